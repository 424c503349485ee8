"""Raw planar video input: Y4M files, headerless YUV, in-memory sequences.

Only 4:2:0 chroma subsampling is handled, 8-bit or 10-bit (16-bit little
endian container), which covers the corpus formats this toolkit targets.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ladderkit.rq import Resolution


class VideoFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Frame:
    """One decoded picture: luma plus optional half-size chroma planes."""

    y: np.ndarray
    u: np.ndarray | None
    v: np.ndarray | None
    bit_depth: int

    def __post_init__(self):
        peak = (1 << self.bit_depth) - 1
        if self.y.max(initial=0) > peak:
            raise VideoFormatError(f"samples exceed {self.bit_depth}-bit range")

    @property
    def height(self) -> int:
        return self.y.shape[0]

    @property
    def width(self) -> int:
        return self.y.shape[1]

    @property
    def peak(self) -> int:
        return (1 << self.bit_depth) - 1

    def luma_normalized(self) -> np.ndarray:
        """Luma as float64 scaled to [0, 1] by the bit-depth peak."""
        return self.y.astype(np.float64) / self.peak


class Sequence:
    """Common interface over file-backed and in-memory sequences."""

    seq_id: str
    width: int
    height: int
    frame_rate: float
    bit_depth: int
    frame_count: int

    def frame(self, index: int) -> Frame:
        raise NotImplementedError

    def frames(self):
        for i in range(self.frame_count):
            yield self.frame(i)

    @property
    def resolution(self) -> Resolution:
        return Resolution(self.width, self.height, f"{self.height}p")


class ArraySequence(Sequence):
    """Sequence held fully in memory; the workhorse for tests and synthesis."""

    def __init__(self, frames, frame_rate=60.0, seq_id="mem"):
        frames = list(frames)
        if not frames:
            raise VideoFormatError("sequence needs at least one frame")
        first = frames[0]
        for f in frames:
            if f.y.shape != first.y.shape or f.bit_depth != first.bit_depth:
                raise VideoFormatError("frames disagree on geometry or depth")
        self._frames = frames
        self.seq_id = seq_id
        self.height, self.width = first.y.shape
        self.frame_rate = float(frame_rate)
        self.bit_depth = first.bit_depth
        self.frame_count = len(frames)

    def frame(self, index: int) -> Frame:
        return self._frames[index]


class FileSequence(Sequence):
    """Reader over a raw .yuv or .y4m file, decoding frames on demand."""

    def __init__(self, path, seq_id, width, height, frame_rate, bit_depth,
                 frame_count, data_offset=0, frame_header=0):
        self.path = Path(path)
        self.seq_id = seq_id
        self.width = width
        self.height = height
        self.frame_rate = frame_rate
        self.bit_depth = bit_depth
        self.frame_count = frame_count
        self._offset = data_offset
        self._frame_header = frame_header
        bps = 2 if bit_depth > 8 else 1
        self._dtype = np.dtype("<u2") if bit_depth > 8 else np.dtype("u1")
        self._y_len = width * height
        self._c_len = (width // 2) * (height // 2)
        self._frame_bytes = frame_header + bps * (self._y_len + 2 * self._c_len)

    def frame(self, index: int) -> Frame:
        if not 0 <= index < self.frame_count:
            raise IndexError(index)
        with open(self.path, "rb") as fh:
            fh.seek(self._offset + index * self._frame_bytes + self._frame_header)
            raw = np.frombuffer(
                fh.read(self._frame_bytes - self._frame_header), dtype=self._dtype
            )
        if raw.size != self._y_len + 2 * self._c_len:
            raise VideoFormatError(f"truncated frame {index} in {self.path}")
        y = raw[: self._y_len].reshape(self.height, self.width)
        u = raw[self._y_len : self._y_len + self._c_len].reshape(
            self.height // 2, self.width // 2
        )
        v = raw[self._y_len + self._c_len :].reshape(
            self.height // 2, self.width // 2
        )
        return Frame(y=y, u=u, v=v, bit_depth=self.bit_depth)


_Y4M_DEPTH = {
    "420": 8, "420jpeg": 8, "420mpeg2": 8, "420paldv": 8,
    "420p10": 10,
}


def _parse_y4m_header(path: Path):
    with open(path, "rb") as fh:
        header = fh.readline()
    if not header.startswith(b"YUV4MPEG2"):
        raise VideoFormatError(f"{path} is not a Y4M file")
    text = header.decode("ascii").strip()
    fields = dict(
        (tok[0], tok[1:]) for tok in text.split(" ")[1:] if tok
    )
    try:
        width = int(fields["W"])
        height = int(fields["H"])
        num, den = fields["F"].split(":")
        fps = int(num) / int(den)
    except (KeyError, ValueError) as exc:
        raise VideoFormatError(f"bad Y4M header in {path}: {text}") from exc
    colour = fields.get("C", "420")
    if colour not in _Y4M_DEPTH:
        raise VideoFormatError(f"unsupported Y4M colourspace {colour}")
    return width, height, fps, _Y4M_DEPTH[colour], len(header)


def open_sequence(path, seq_id=None, width=None, height=None,
                  frame_rate=None, bit_depth=8, frame_count=None) -> FileSequence:
    """Open a .y4m (self-describing) or raw .yuv file (geometry required)."""
    path = Path(path)
    if not path.is_file():
        raise VideoFormatError(f"no such file: {path}")
    seq_id = seq_id or path.stem
    if path.suffix.lower() == ".y4m":
        width, height, frame_rate, bit_depth, offset = _parse_y4m_header(path)
        frame_header = len(b"FRAME\n")
        bps = 2 if bit_depth > 8 else 1
        frame_bytes = frame_header + bps * (width * height * 3 // 2)
        count = (path.stat().st_size - offset) // frame_bytes
        return FileSequence(path, seq_id, width, height, frame_rate, bit_depth,
                            count, data_offset=offset, frame_header=frame_header)
    if None in (width, height, frame_rate):
        raise VideoFormatError(f"raw YUV {path} needs width/height/frame_rate")
    bps = 2 if bit_depth > 8 else 1
    frame_bytes = bps * (width * height * 3 // 2)
    available = path.stat().st_size // frame_bytes
    count = frame_count if frame_count is not None else available
    if count > available:
        raise VideoFormatError(
            f"{path} holds {available} frames, manifest claims {count}"
        )
    return FileSequence(path, seq_id, width, height, frame_rate, bit_depth, count)


def write_y4m(path, sequence: Sequence) -> None:
    colour = "420p10" if sequence.bit_depth > 8 else "420"
    fps_num = int(round(sequence.frame_rate * 1000))
    header = (
        f"YUV4MPEG2 W{sequence.width} H{sequence.height} "
        f"F{fps_num}:1000 Ip A1:1 C{colour}\n"
    )
    dtype = np.dtype("<u2") if sequence.bit_depth > 8 else np.dtype("u1")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        for frame in sequence.frames():
            fh.write(b"FRAME\n")
            for plane in (frame.y, frame.u, frame.v):
                fh.write(np.ascontiguousarray(plane, dtype=dtype).tobytes())


def write_yuv(path, sequence: Sequence) -> None:
    dtype = np.dtype("<u2") if sequence.bit_depth > 8 else np.dtype("u1")
    with open(path, "wb") as fh:
        for frame in sequence.frames():
            for plane in (frame.y, frame.u, frame.v):
                fh.write(np.ascontiguousarray(plane, dtype=dtype).tobytes())


MANIFEST_COLUMNS = ("id", "path", "width", "height", "fps", "bit_depth", "frames")


@dataclass(frozen=True)
class ManifestEntry:
    seq_id: str
    path: Path
    width: int
    height: int
    fps: float
    bit_depth: int
    frames: int

    def open(self) -> FileSequence:
        return open_sequence(
            self.path, seq_id=self.seq_id, width=self.width, height=self.height,
            frame_rate=self.fps, bit_depth=self.bit_depth, frame_count=self.frames,
        )


def load_manifest(path) -> list[ManifestEntry]:
    """Parse the sequence manifest CSV (id, path, width, height, fps,
    bit_depth, frames). Relative paths resolve against the manifest."""
    path = Path(path)
    entries = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(MANIFEST_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise VideoFormatError(f"manifest missing columns: {sorted(missing)}")
        for row in reader:
            seq_path = Path(row["path"])
            if not seq_path.is_absolute():
                seq_path = path.parent / seq_path
            entries.append(
                ManifestEntry(
                    seq_id=row["id"],
                    path=seq_path,
                    width=int(row["width"]),
                    height=int(row["height"]),
                    fps=float(row["fps"]),
                    bit_depth=int(row["bit_depth"]),
                    frames=int(row["frames"]),
                )
            )
    return entries
