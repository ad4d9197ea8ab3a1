"""
Dataset readers - MNIST-style IDX files and CIFAR-10 binary batches

Both readers take local paths only. Official sources:
    MNIST          http://yann.lecun.com/exdb/mnist/
    Fashion-MNIST  https://github.com/zalandoresearch/fashion-mnist
    CIFAR-10       https://www.cs.toronto.edu/~kriz/cifar.html (binary version)
"""

import gzip
import logging
import struct
from pathlib import Path
from typing import Iterable, Tuple, Union

import numpy as np

from ..core.exceptions import FormatError, InsufficientDataError, LabelError, ZeroImageError
from ..core.models import LabeledImages, Sample

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
IDX_DIMENSIONS = {IDX_IMAGES_MAGIC: 3, IDX_LABELS_MAGIC: 1}

CIFAR_RECORD_BYTES = 3073
CIFAR_PIXEL_BYTES = 3072

CIFAR10_CLASSES = (
    "airplane", "automobile", "bird", "cat", "deer",
    "dog", "frog", "horse", "ship", "truck",
)

# (positive label, negative label) for the two-class smoothness experiments
CLASS_PAIRS = {
    "mnist": (1, 7),           # digits 1 and 7
    "fashion-mnist": (1, 7),   # trouser and sneaker
    "cifar10": (1, 7),         # automobile and horse
}


def _read_bytes(path: PathLike) -> bytes:
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as f:
        return f.read()


def load_idx(path: PathLike) -> np.ndarray:
    """Parse an IDX file: 0x803 -> (count, rows, cols) uint8, 0x801 -> (count,) uint8"""
    raw = _read_bytes(path)
    if len(raw) < 8:
        raise FormatError(path, f"file has {len(raw)} bytes, too short for an IDX header")

    (magic,) = struct.unpack(">I", raw[:4])
    if magic not in IDX_DIMENSIONS:
        raise FormatError(path, f"unsupported magic number 0x{magic:08x}")
    ndim = IDX_DIMENSIONS[magic]
    header_bytes = 4 + 4 * ndim
    if len(raw) < header_bytes:
        raise FormatError(path, f"truncated header: {len(raw)} < {header_bytes} bytes")

    dims = struct.unpack(f">{ndim}I", raw[4:header_bytes])
    expected = header_bytes + int(np.prod(dims, dtype=np.int64))
    if len(raw) != expected:
        raise FormatError(path, f"expected {expected} bytes for dimensions {dims}, found {len(raw)}")

    data = np.frombuffer(raw, dtype=np.uint8, offset=header_bytes).reshape(dims)
    logger.debug(f"Loaded IDX {path}: shape {data.shape}")
    return data


def load_idx_dataset(images_path: PathLike, labels_path: PathLike, source: str) -> LabeledImages:
    """Pair an IDX image file with its label file and flatten the images"""
    images = load_idx(images_path)
    labels = load_idx(labels_path)
    if images.ndim != 3:
        raise FormatError(images_path, "expected an image tensor (magic 0x00000803)")
    if labels.ndim != 1:
        raise FormatError(labels_path, "expected a label vector (magic 0x00000801)")
    if images.shape[0] != labels.shape[0]:
        raise FormatError(labels_path, f"{labels.shape[0]} labels for {images.shape[0]} images")
    return LabeledImages(images=images.reshape(images.shape[0], -1), labels=labels, source=source)


def load_cifar10(path: Union[PathLike, Iterable[PathLike]]) -> LabeledImages:
    """Parse one or more CIFAR-10 binary batches (1 label byte + 3072 channel-planar pixels per record)"""
    paths = [path] if isinstance(path, (str, Path)) else list(path)
    images, labels = [], []
    for batch_path in paths:
        raw = _read_bytes(batch_path)
        if len(raw) == 0 or len(raw) % CIFAR_RECORD_BYTES != 0:
            raise FormatError(batch_path, f"size {len(raw)} is not a positive multiple of {CIFAR_RECORD_BYTES}")
        records = np.frombuffer(raw, dtype=np.uint8).reshape(-1, CIFAR_RECORD_BYTES)
        batch_labels = records[:, 0]
        bad = np.flatnonzero(batch_labels > 9)
        if bad.size:
            raise LabelError(batch_path, int(batch_labels[bad[0]]), int(bad[0]))
        images.append(records[:, 1:])
        labels.append(batch_labels)
        logger.debug(f"Loaded CIFAR-10 batch {batch_path}: {records.shape[0]} records")
    return LabeledImages(images=np.vstack(images), labels=np.concatenate(labels), source="cifar10")


def two_class_subset(data: LabeledImages, label_pos: int, label_neg: int, n: int, seed: int) -> Sample:
    """n images drawn without replacement from the pooled two classes, projected to the unit sphere"""
    pool = np.flatnonzero(np.isin(data.labels, (label_pos, label_neg)))
    if pool.size < n:
        raise InsufficientDataError(n, int(pool.size))

    rng = np.random.default_rng(seed)
    chosen = rng.choice(pool, size=n, replace=False)
    X = data.images[chosen].astype(float)
    norms = np.linalg.norm(X, axis=1)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise ZeroImageError(int(chosen[zero[0]]))
    X = X / norms[:, None]
    Y = np.where(data.labels[chosen] == label_pos, 1.0, -1.0)
    return X, Y


def subset_source(data: LabeledImages, label_pos: int, label_neg: int):
    """Adapter turning a dataset into a (n, seed) -> (X, Y) data source"""
    def source(n: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
        return two_class_subset(data, label_pos, label_neg, n, seed)
    return source
