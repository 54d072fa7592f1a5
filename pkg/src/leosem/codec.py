"""Compact bitstream codec for detection payloads.

Wire format, big-endian bit order:

    8 bits   detection count (0..255)
    per detection (48 bits):
        10 bits  x (top-left, pixels)
        10 bits  y
        10 bits  w
        10 bits  h
        6 bits   class id
        8 bits   confidence, quantized round(conf * 255)

Total length is exactly 8 + 48*count bits; the byte stream is zero-padded
to a whole byte and the bit length field is authoritative.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import CodecError
from .scenario import ImagingParams

COUNT_BITS = 8
COORD_BITS = 10
CLASS_BITS = 6
CONF_BITS = 8
DETECTION_BITS = 4 * COORD_BITS + CLASS_BITS + CONF_BITS
MAX_DETECTIONS = (1 << COUNT_BITS) - 1
MAX_SIDE_PX = 1 << COORD_BITS


@dataclass(frozen=True)
class Detection:
    class_id: int
    x_px: int
    y_px: int
    w_px: int
    h_px: int
    confidence: float


@dataclass(frozen=True)
class SemanticPayload:
    data: bytes
    length_bits: int
    image_id: int = 0
    detection_count: int = 0

    def to_hex(self) -> str:
        return self.data.hex()

    @classmethod
    def from_hex(cls, hex_str: str, length_bits: int, image_id: int = 0) -> "SemanticPayload":
        if length_bits < COUNT_BITS:
            raise CodecError("payload shorter than the count field")
        data = bytes.fromhex(hex_str)
        count = data[0] if data else 0
        return cls(data=data, length_bits=length_bits, image_id=image_id,
                   detection_count=count)


def payload_bits(detection_count: int) -> int:
    return COUNT_BITS + DETECTION_BITS * detection_count


class _BitWriter:
    def __init__(self):
        self._acc = 0
        self._nbits = 0

    def put(self, value: int, nbits: int) -> None:
        if value < 0 or value >= (1 << nbits):
            raise CodecError(f"field overflow: {value} does not fit in {nbits} bits")
        self._acc = (self._acc << nbits) | value
        self._nbits += nbits

    def to_bytes(self) -> bytes:
        pad = (-self._nbits) % 8
        return ((self._acc << pad)).to_bytes((self._nbits + pad) // 8, "big") if self._nbits else b""

    @property
    def nbits(self) -> int:
        return self._nbits


class _BitReader:
    def __init__(self, data: bytes, length_bits: int):
        self._value = int.from_bytes(data, "big")
        self._total = len(data) * 8
        self._pos = 0
        self._length = length_bits

    def get(self, nbits: int) -> int:
        if self._pos + nbits > self._length:
            raise CodecError("truncated payload")
        shift = self._total - self._pos - nbits
        self._pos += nbits
        return (self._value >> shift) & ((1 << nbits) - 1)


def _check_detection(d: Detection, dims: ImagingParams) -> None:
    if not 0 <= d.class_id < (1 << CLASS_BITS):
        raise CodecError(f"class_id {d.class_id} outside [0, {(1 << CLASS_BITS) - 1}]")
    if d.w_px < 1 or d.h_px < 1:
        raise CodecError("box extent must be >= 1 px")
    if d.x_px < 0 or d.y_px < 0 or d.x_px + d.w_px > dims.width_px or d.y_px + d.h_px > dims.height_px:
        raise CodecError(
            f"box outside image: ({d.x_px},{d.y_px})+({d.w_px},{d.h_px}) "
            f"vs {dims.width_px}x{dims.height_px}"
        )
    if not 0.0 <= d.confidence <= 1.0:
        raise CodecError("confidence must lie in [0, 1]")


def encode_detections(
    dets: list[Detection], dims: ImagingParams, image_id: int = 0
) -> SemanticPayload:
    if len(dets) > MAX_DETECTIONS:
        raise CodecError(f"too many detections: {len(dets)} > {MAX_DETECTIONS}")
    if dims.width_px > MAX_SIDE_PX or dims.height_px > MAX_SIDE_PX:
        raise CodecError(f"image too large for {COORD_BITS}-bit coordinates")
    w = _BitWriter()
    w.put(len(dets), COUNT_BITS)
    for d in dets:
        _check_detection(d, dims)
        w.put(d.x_px, COORD_BITS)
        w.put(d.y_px, COORD_BITS)
        w.put(d.w_px, COORD_BITS)
        w.put(d.h_px, COORD_BITS)
        w.put(d.class_id, CLASS_BITS)
        w.put(round(d.confidence * 255), CONF_BITS)
    return SemanticPayload(
        data=w.to_bytes(), length_bits=w.nbits, image_id=image_id,
        detection_count=len(dets),
    )


def decode_detections(p: SemanticPayload, dims: ImagingParams) -> list[Detection]:
    """Exact inverse of encode up to confidence quantization (<= 1/510)."""
    r = _BitReader(p.data, p.length_bits)
    count = r.get(COUNT_BITS)
    if p.length_bits != payload_bits(count):
        raise CodecError(
            f"count/length mismatch: {count} detections need {payload_bits(count)} bits, "
            f"payload declares {p.length_bits}"
        )
    out = []
    for _ in range(count):
        x = r.get(COORD_BITS)
        y = r.get(COORD_BITS)
        w = r.get(COORD_BITS)
        h = r.get(COORD_BITS)
        cls = r.get(CLASS_BITS)
        conf = r.get(CONF_BITS) / 255.0
        d = Detection(class_id=cls, x_px=x, y_px=y, w_px=w, h_px=h, confidence=conf)
        _check_detection(d, dims)
        out.append(d)
    return out


def compression_ratio(dims: ImagingParams, payload_bits_count: float) -> float:
    if payload_bits_count <= 0:
        raise ValueError("payload_bits must be positive")
    return dims.raw_bits / payload_bits_count


# JSON-lines exchange format for test vectors: one detection object per line.

def detections_to_jsonl(dets: list[Detection]) -> str:
    lines = [
        json.dumps(
            {"class_id": d.class_id, "x_px": d.x_px, "y_px": d.y_px,
             "w_px": d.w_px, "h_px": d.h_px, "confidence": d.confidence},
            sort_keys=True,
        )
        for d in dets
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def detections_from_jsonl(text: str) -> list[Detection]:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        out.append(Detection(
            class_id=obj["class_id"], x_px=obj["x_px"], y_px=obj["y_px"],
            w_px=obj["w_px"], h_px=obj["h_px"], confidence=obj["confidence"],
        ))
    return out
