"""
Reader and writer for the IDX binary format used by MNIST.

Layout (all integers big-endian):

    images: u32 magic 0x00000803 | u32 count | u32 rows | u32 cols | u8 pixels
    labels: u32 magic 0x00000801 | u32 count | u8 labels

Files ending in ``.gz`` are transparently (de)compressed.
"""

import gzip
import logging
import os
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from src.data.image_set import ImageSet, Split, split_train_val
from src.utils.errors import DatasetError, DimensionMismatchError, IDXFormatError

logger = logging.getLogger(__name__)

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801

TRAIN_IMAGES = "train-images-idx3-ubyte"
TRAIN_LABELS = "train-labels-idx1-ubyte"

PathLike = Union[str, "os.PathLike[str]"]


def _read_bytes(path: PathLike) -> bytes:
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as f:
        return f.read()


def _write_bytes(path: PathLike, payload: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "wb") as f:
        f.write(payload)


def _parse_header(raw: bytes, expected_magic: int, n_dims: int, path: PathLike) -> Tuple[int, ...]:
    header_size = 4 * (1 + n_dims)
    if len(raw) < header_size:
        raise IDXFormatError(f"{path}: truncated header ({len(raw)} bytes)")

    header = np.frombuffer(raw[:header_size], dtype=">u4")
    magic = int(header[0])
    if magic != expected_magic:
        raise IDXFormatError(
            f"{path}: bad magic number 0x{magic:08x}, expected 0x{expected_magic:08x}"
        )

    dims = tuple(int(d) for d in header[1:])
    expected = header_size + int(np.prod(dims, dtype=np.int64))
    if len(raw) < expected:
        raise IDXFormatError(f"{path}: truncated payload ({len(raw)} of {expected} bytes)")
    return dims


def load_idx(
    image_path: PathLike,
    label_path: PathLike,
    split: Split = Split.TRAIN
) -> ImageSet:
    """
    Load an IDX image/label file pair.

    Args:
        image_path: Path to the idx3 image file
        label_path: Path to the idx1 label file
        split: Split tag given to the result

    Returns:
        ImageSet with pixels scaled from [0, 255] to [0, 1]

    Raises:
        IDXFormatError: Bad magic number or truncated file
        DimensionMismatchError: Image and label counts differ
    """
    raw_images = _read_bytes(image_path)
    raw_labels = _read_bytes(label_path)

    count, rows, cols = _parse_header(raw_images, IMAGE_MAGIC, 3, image_path)
    (label_count,) = _parse_header(raw_labels, LABEL_MAGIC, 1, label_path)

    if count != label_count:
        raise DimensionMismatchError(
            f"{image_path} holds {count} images but {label_path} holds {label_count} labels"
        )

    pixels = np.frombuffer(raw_images[16:16 + count * rows * cols], dtype=np.uint8)
    labels = np.frombuffer(raw_labels[8:8 + count], dtype=np.uint8)

    logger.info(f"Loaded {count} images of {rows}x{cols} from {image_path}")
    return ImageSet(
        pixels=pixels.reshape(count, rows * cols).astype(np.float64) / 255.0,
        labels=labels.astype(np.int64),
        split=split,
    )


def write_idx(image_set: ImageSet, image_path: PathLike, label_path: PathLike) -> None:
    """
    Write an ImageSet as an IDX image/label file pair.

    Pixels are quantized to bytes with ``round(255 * pixel)``.

    Args:
        image_set: Images to write
        image_path: Destination of the idx3 image file
        label_path: Destination of the idx1 label file
    """
    count, side = len(image_set), image_set.side
    quantized = np.rint(image_set.pixels * 255.0).astype(np.uint8)

    image_header = np.array([IMAGE_MAGIC, count, side, side], dtype=">u4").tobytes()
    label_header = np.array([LABEL_MAGIC, count], dtype=">u4").tobytes()

    _write_bytes(image_path, image_header + quantized.tobytes())
    _write_bytes(label_path, label_header + image_set.labels.astype(np.uint8).tobytes())
    logger.debug(f"Wrote {count} images to {image_path}")


def _locate(data_dir: Path, stem: str) -> Path:
    for candidate in (data_dir / stem, data_dir / f"{stem}.gz"):
        if candidate.exists():
            return candidate
    raise DatasetError(f"Neither {stem} nor {stem}.gz found in {data_dir}")


def load_mnist(data_dir: PathLike, n_train: int = 50000) -> Tuple[ImageSet, ImageSet]:
    """
    Load the MNIST train file and split it into train and validation sets.

    Args:
        data_dir: Directory containing the MNIST train IDX files
        n_train: Number of leading images used for training

    Returns:
        (train, validation)
    """
    data_dir = Path(data_dir)
    full = load_idx(_locate(data_dir, TRAIN_IMAGES), _locate(data_dir, TRAIN_LABELS))
    return split_train_val(full, n_train)
