"""Latest-frame video hub: JPEG ingestion, overlay compositing, MJPEG out."""

from __future__ import annotations

import asyncio
import io
from typing import AsyncIterator, Optional

from PIL import Image, ImageDraw

MJPEG_BOUNDARY = "carisframe"
JPEG_MAGIC = b"\xff\xd8"
BOX_COLOR = (50, 220, 50)


class VideoHub:
    def __init__(self, placeholder_size=(640, 480)):
        self._frame: Optional[bytes] = None
        self.frame_id: int = -1
        self._placeholder_size = placeholder_size
        self._new_frame = asyncio.Event()

    def push_frame(self, frame_id: int, jpeg: bytes) -> None:
        if frame_id <= self.frame_id:
            raise ValueError(f"frame {frame_id} not after {self.frame_id}")
        if not jpeg.startswith(JPEG_MAGIC):
            raise ValueError("payload is not a JPEG image")
        self._frame = jpeg
        self.frame_id = frame_id
        self._new_frame.set()

    @property
    def has_frame(self) -> bool:
        return self._frame is not None

    def placeholder(self) -> Image.Image:
        img = Image.new("RGB", self._placeholder_size, (40, 40, 40))
        draw = ImageDraw.Draw(img)
        draw.text((20, 20), "no camera frames yet", fill=(200, 200, 200))
        return img

    def composite(self, track_views) -> bytes:
        """Current frame (or placeholder) with one labeled box per track."""
        if self._frame is None:
            img = self.placeholder()
        else:
            img = Image.open(io.BytesIO(self._frame)).convert("RGB")
        draw = ImageDraw.Draw(img)
        for view in track_views:
            cx, cy, w, h = view.bbox
            x0, y0, x1, y1 = cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2
            draw.rectangle((x0, y0, x1, y1), outline=BOX_COLOR, width=3)
            tag = view.label if view.person_id is None else f"{view.label} #{view.person_id}"
            draw.rectangle((x0, y0 - 14, x0 + 7 * len(tag) + 6, y0), fill=BOX_COLOR)
            draw.text((x0 + 3, y0 - 13), tag, fill=(0, 0, 0))
        buf = io.BytesIO()
        img.save(buf, format="JPEG", quality=85)
        return buf.getvalue()

    def snapshot_png(self) -> bytes:
        """Latest raw frame re-encoded as PNG (photo capture path)."""
        if self._frame is None:
            raise LookupError("no camera frame available")
        img = Image.open(io.BytesIO(self._frame)).convert("RGB")
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return buf.getvalue()

    async def mjpeg_stream(self, views_provider, max_fps: float = 10.0) -> AsyncIterator[bytes]:
        """Multipart generator; re-composites whenever a new frame lands."""
        interval = 1.0 / max_fps
        while True:
            jpeg = self.composite(await views_provider())
            yield (
                f"--{MJPEG_BOUNDARY}\r\n"
                f"Content-Type: image/jpeg\r\n"
                f"Content-Length: {len(jpeg)}\r\n\r\n"
            ).encode("ascii") + jpeg + b"\r\n"
            self._new_frame.clear()
            try:
                await asyncio.wait_for(self._new_frame.wait(), timeout=interval)
            except asyncio.TimeoutError:
                pass
