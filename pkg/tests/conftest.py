import gzip
import struct
from pathlib import Path

import numpy as np
import pytest

from kernel_lab.core.models import KernelSpec
from kernel_lab.data.synth import constant_model, cosine_model


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def min_kernel():
    return KernelSpec.min_kernel()


@pytest.fixture
def ntk2():
    return KernelSpec.ntk_kernel(2)


@pytest.fixture
def cos_model():
    return cosine_model()


@pytest.fixture
def zero_model():
    return constant_model(0.0)


@pytest.fixture
def interval_sample(rng):
    """Twenty distinct points in (0.05, 1) with +-1 labels"""
    X = np.sort(rng.uniform(0.05, 1.0, size=20)).reshape(-1, 1)
    Y = np.where(rng.uniform(size=20) < 0.5, 1.0, -1.0)
    return X, Y


def idx_bytes(magic: int, dims, payload: bytes) -> bytes:
    return struct.pack(">I", magic) + struct.pack(f">{len(dims)}I", *dims) + payload


@pytest.fixture
def write_idx(tmp_path):
    """Factory writing an IDX file (optionally gzipped) under tmp_path"""

    def write(name: str, magic: int, dims, payload: bytes, compress: bool = False) -> Path:
        path = tmp_path / name
        data = idx_bytes(magic, dims, payload)
        if compress:
            with gzip.open(path, "wb") as f:
                f.write(data)
        else:
            path.write_bytes(data)
        return path

    return write


@pytest.fixture
def write_cifar(tmp_path):
    """Factory writing a CIFAR-10 binary batch from (label, fill byte) records"""

    def write(name: str, records) -> Path:
        path = tmp_path / name
        chunks = [bytes([label]) + bytes([fill]) * 3072 for label, fill in records]
        path.write_bytes(b"".join(chunks))
        return path

    return write


@pytest.fixture
def mnist_like(write_idx):
    """Twelve 2x2 images: labels 1 and 7 alternate, plus two label-3 images"""
    labels = bytes([1, 7] * 5 + [3, 3])
    images = bytes((i * 4 + k) % 250 + 1 for i in range(12) for k in range(4))
    image_path = write_idx("images-idx3-ubyte", 0x803, (12, 2, 2), images)
    label_path = write_idx("labels-idx1-ubyte", 0x801, (12,), labels)
    return image_path, label_path
