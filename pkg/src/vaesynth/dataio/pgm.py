from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np

MAGIC = b"P5"
MAXVAL = 255


class PgmFormatError(ValueError):
    """Raised for a malformed or unsupported PGM file; `offset` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


@dataclass
class GrayImage:
    """
    An 8-bit grayscale image.

    Attributes:
        width (int): Number of columns.
        height (int): Number of rows.
        pixels (np.ndarray): uint8 array of shape (height, width), row-major.
    """
    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width):
            raise ValueError(f"Pixel array of shape {self.pixels.shape} does not match "
                             f"{self.width}x{self.height}")

    @classmethod
    def from_array(cls, pixels: np.ndarray) -> 'GrayImage':
        pixels = np.asarray(pixels)
        return cls(width=pixels.shape[1], height=pixels.shape[0], pixels=pixels)


def _is_space(b: int) -> bool:
    return b in b" \t\r\n\v\f"


def _next_token(data: bytes, pos: int) -> Tuple[bytes, int]:
    """Return the next header token starting at `pos` and the position after it, skipping comments."""
    n = len(data)
    while pos < n:
        if data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        elif _is_space(data[pos]):
            pos += 1
        else:
            break
    start = pos
    while pos < n and not _is_space(data[pos]) and data[pos] != ord("#"):
        pos += 1
    if start == pos:
        raise PgmFormatError("Unexpected end of header", start)
    return data[start:pos], pos


def _header_int(data: bytes, pos: int, what: str) -> Tuple[int, int]:
    token, end = _next_token(data, pos)
    if not token.isdigit():
        raise PgmFormatError(f"Invalid {what}: {token!r}", end - len(token))
    return int(token), end


def decode_pgm(data: bytes) -> GrayImage:
    """
    Decode the bytes of a binary (P5) PGM file with maxval 255.

    Header comments are skipped, including one directly after maxval that ends at the newline before the
    pixels.

    :param data: The file contents.
    :return: The decoded image.
    :raises PgmFormatError: On a bad magic number, an unsupported maxval or a truncated payload.
    """
    if data[:2] != MAGIC:
        raise PgmFormatError(f"Bad magic number {data[:2]!r}, expected {MAGIC!r}", 0)
    width, pos = _header_int(data, 2, "width")
    height, pos = _header_int(data, pos, "height")
    maxval, pos = _header_int(data, pos, "maxval")
    if maxval != MAXVAL:
        raise PgmFormatError(f"unsupported maxval {maxval}", pos)
    if width == 0 or height == 0:
        raise PgmFormatError(f"Zero image dimension {width}x{height}", pos)
    if pos < len(data) and data[pos] == ord("#"):
        while pos < len(data) and data[pos] not in b"\r\n":
            pos += 1
    if pos >= len(data) or not _is_space(data[pos]):
        raise PgmFormatError("Missing whitespace after maxval", pos)
    pos += 1
    size = width * height
    if len(data) - pos < size:
        raise PgmFormatError(f"Truncated payload: expected {size} bytes, found {len(data) - pos}", len(data))
    pixels = np.frombuffer(data, dtype=np.uint8, count=size, offset=pos).reshape(height, width)
    return GrayImage(width, height, pixels.copy())


def encode_pgm(img: GrayImage) -> bytes:
    """Encode an image as binary PGM without comments: ``P5\\n<w> <h>\\n255\\n`` followed by the pixels."""
    return f"P5\n{img.width} {img.height}\n{MAXVAL}\n".encode("ascii") + img.pixels.tobytes()


def read_pgm(path: Path) -> GrayImage:
    """
    Read a binary PGM file.

    :param path: Path of the file.
    :return: The image.
    :raises IOError: If the file cannot be read.
    :raises PgmFormatError: If the file is not a valid 8-bit P5 PGM.
    """
    with open(path, "rb") as f:
        return decode_pgm(f.read())


def write_pgm(img: GrayImage, path: Path) -> None:
    """
    Write an image as binary PGM. The parent directory must exist.

    :param img: The image.
    :param path: Destination path.
    """
    with open(path, "wb") as f:
        f.write(encode_pgm(img))
