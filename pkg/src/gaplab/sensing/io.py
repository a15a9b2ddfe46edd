"""On-disk image formats: binary PPM (P6) for RGB and DPTH raw for depth.

DPTH layout, little-endian: magic b"DPTH", width u32, height u32,
max_range f32 (16-byte header), then height*width float32 planar
z-depths, row-major.
"""

import struct

import numpy as np

from gaplab.sensing.types import DepthImage, RGBImage

DEPTH_MAGIC = b"DPTH"


def write_ppm(image, path):
    with open(path, "wb") as fh:
        fh.write(f"P6\n{image.width} {image.height}\n255\n".encode("ascii"))
        fh.write(image.data.tobytes())


def read_ppm(path):
    with open(path, "rb") as fh:
        magic = fh.readline().strip()
        if magic != b"P6":
            raise ValueError(f"not a binary PPM file: {magic!r}")
        line = fh.readline()
        while line.startswith(b"#"):
            line = fh.readline()
        width, height = (int(v) for v in line.split())
        maxval = int(fh.readline())
        if maxval != 255:
            raise ValueError("only 8-bit PPM supported")
        data = np.frombuffer(fh.read(width * height * 3), dtype=np.uint8)
    return RGBImage(data.reshape(height, width, 3).copy())


def write_depth(depth, path):
    header = DEPTH_MAGIC + struct.pack("<IIf", depth.width, depth.height,
                                       depth.max_range)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(depth.data.astype("<f4").tobytes())


def read_depth(path):
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:4] != DEPTH_MAGIC:
            raise ValueError("not a DPTH depth file")
        width, height, max_range = struct.unpack("<IIf", header[4:])
        data = np.frombuffer(fh.read(width * height * 4), dtype="<f4")
    return DepthImage(data.reshape(height, width).astype(np.float32),
                      max_range=float(max_range))
