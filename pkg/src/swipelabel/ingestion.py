"""Archive ingestion: unpack zip/tar uploads, validate image headers, and
register immutable datasets.

Image validation parses only the header (PNG IHDR chunk, JPEG SOF segment),
never the pixel data. Supported formats are PNG and JPEG; anything else in
the archive becomes a warning, not a failure.
"""

from __future__ import annotations

import csv
import hashlib
import io
import tarfile
import zipfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from uuid import uuid4

from .errors import (
    CorruptArchive,
    DuplicateFilename,
    EmptyDataset,
    ManifestMismatch,
    TruncatedImage,
    UnsupportedFormat,
)

MANIFEST_FILENAME = "labels.csv"


class ImageFormat(Enum):
    PNG = "png"
    JPEG = "jpeg"


class ArchiveFormat(Enum):
    ZIP = "zip"
    TAR = "tar"


_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
# SOF markers carrying frame dimensions; C4 (DHT), C8 (JPG ext) and CC (DAC)
# are not frame headers.
_JPEG_SOF_MARKERS = {
    0xC0, 0xC1, 0xC2, 0xC3, 0xC5, 0xC6, 0xC7, 0xC9, 0xCA, 0xCB, 0xCD, 0xCE, 0xCF,
}
_JPEG_STANDALONE = {0x01, *range(0xD0, 0xD8)}  # TEM, RST0-7: no length field


def _parse_png(data: bytes) -> tuple[int, int]:
    # signature(8) + chunk length(4) + "IHDR"(4) + width(4) + height(4)
    if len(data) < 24:
        raise TruncatedImage("PNG data ends before the IHDR chunk")
    if data[12:16] != b"IHDR":
        raise UnsupportedFormat("PNG signature without leading IHDR chunk")
    width = int.from_bytes(data[16:20], "big")
    height = int.from_bytes(data[20:24], "big")
    if width < 1 or height < 1:
        raise UnsupportedFormat(f"PNG header declares invalid size {width}x{height}")
    return width, height


def _parse_jpeg(data: bytes) -> tuple[int, int]:
    pos = 2  # past SOI
    n = len(data)
    while True:
        # seek the next marker, tolerating fill bytes
        while pos < n and data[pos] != 0xFF:
            pos += 1
        while pos < n and data[pos] == 0xFF:
            pos += 1
        if pos >= n:
            raise TruncatedImage("JPEG data ends before a frame header")
        marker = data[pos]
        pos += 1
        if marker in _JPEG_STANDALONE:
            continue
        if marker == 0xD9:  # EOI before any SOF
            raise TruncatedImage("JPEG ends without a frame header")
        if pos + 2 > n:
            raise TruncatedImage("JPEG segment length missing")
        length = int.from_bytes(data[pos:pos + 2], "big")
        if length < 2:
            raise UnsupportedFormat("JPEG segment with invalid length")
        if marker in _JPEG_SOF_MARKERS:
            if pos + 7 > n:
                raise TruncatedImage("JPEG frame header truncated")
            height = int.from_bytes(data[pos + 3:pos + 5], "big")
            width = int.from_bytes(data[pos + 5:pos + 7], "big")
            if width < 1 or height < 1:
                raise UnsupportedFormat(f"JPEG header declares invalid size {width}x{height}")
            return width, height
        if marker == 0xDA:  # SOS: frame header should have come first
            raise TruncatedImage("JPEG scan starts before a frame header")
        pos += length


def validate_image(data: bytes) -> tuple[int, int, ImageFormat]:
    """Decode (width, height, format) from the image header alone.

    Raises :class:`~swipelabel.errors.TruncatedImage` when the bytes stop
    short of a complete header and
    :class:`~swipelabel.errors.UnsupportedFormat` for anything that is not
    PNG or JPEG.
    """
    if len(data) < 2:
        raise TruncatedImage("image data shorter than any magic number")
    if data.startswith(_PNG_SIGNATURE):
        width, height = _parse_png(data)
        return width, height, ImageFormat.PNG
    if len(data) < 8 and _PNG_SIGNATURE.startswith(data):
        raise TruncatedImage("PNG signature truncated")
    if data[0] == 0xFF and data[1] == 0xD8:
        width, height = _parse_jpeg(data)
        return width, height, ImageFormat.JPEG
    raise UnsupportedFormat("not a PNG or JPEG image")


@dataclass(frozen=True)
class ImagePatch:
    """One validated image in a dataset."""

    patch_id: str
    filename: str
    width: int
    height: int
    format: ImageFormat
    content_hash: str              # SHA-256 hex of the raw file bytes
    ground_truth: str | None = None


@dataclass(frozen=True)
class Dataset:
    dataset_id: str
    name: str
    patches: tuple[ImagePatch, ...]
    created_at: datetime

    def patch_by_id(self, patch_id: str) -> ImagePatch:
        for p in self.patches:
            if p.patch_id == patch_id:
                return p
        raise KeyError(patch_id)


@dataclass
class IngestResult:
    dataset: Dataset
    warnings: list[str] = field(default_factory=list)
    # raw bytes per filename, for handing off to a blob store
    contents: dict[str, bytes] = field(default_factory=dict)


def _archive_entries(archive_bytes: bytes, declared: ArchiveFormat
                     ) -> list[tuple[str, bytes]]:
    """(name, bytes) for every regular-file entry, in archive order."""
    entries = []
    try:
        if declared is ArchiveFormat.ZIP:
            with zipfile.ZipFile(io.BytesIO(archive_bytes)) as zf:
                for info in zf.infolist():
                    if info.is_dir():
                        continue
                    entries.append((info.filename, zf.read(info)))
        else:
            # r:* transparently handles gzip-compressed tars
            with tarfile.open(fileobj=io.BytesIO(archive_bytes), mode="r:*") as tf:
                for member in tf.getmembers():
                    if not member.isfile():
                        continue
                    fobj = tf.extractfile(member)
                    entries.append((member.name, fobj.read() if fobj else b""))
    except (zipfile.BadZipFile, tarfile.TarError, EOFError) as exc:
        raise CorruptArchive(f"cannot decode {declared.value} archive: {exc}") from exc
    return entries


def _normalize_name(name: str) -> str:
    name = name.replace("\\", "/")
    while name.startswith("./"):
        name = name[2:]
    return name.lstrip("/")


def parse_manifest(data: bytes | str) -> dict[str, str]:
    """Ground-truth manifest: CSV with a filename,label header row."""
    text = data.decode("utf-8-sig") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r]
    if not rows or [c.strip().lower() for c in rows[0]] != ["filename", "label"]:
        raise ManifestMismatch("manifest must start with a 'filename,label' header row")
    table = {}
    for row in rows[1:]:
        if len(row) != 2:
            raise ManifestMismatch(f"manifest row {row!r} does not have two columns")
        table[_normalize_name(row[0].strip())] = row[1].strip()
    return table


def ingest_archive(archive_bytes: bytes, declared_format: ArchiveFormat,
                   name: str, manifest: bytes | str | None = None,
                   dataset_id: str | None = None,
                   created_at: datetime | None = None) -> IngestResult:
    """Unpack an image archive into a registered dataset.

    Every decodable PNG/JPEG entry becomes a patch; other regular files are
    skipped with a warning. Patches are ordered by filename. A ground-truth
    manifest may be embedded as ``labels.csv`` or passed separately; rows
    from a separate manifest override embedded ones. When any manifest is
    present it must cover the image set exactly.
    """
    if not archive_bytes:
        raise CorruptArchive("empty upload")
    raw_entries = _archive_entries(archive_bytes, declared_format)

    seen: set[str] = set()
    images: dict[str, bytes] = {}
    warnings: list[str] = []
    embedded_manifest: bytes | None = None
    for raw_name, data in raw_entries:
        entry_name = _normalize_name(raw_name)
        if entry_name in seen:
            raise DuplicateFilename(f"archive contains {entry_name!r} more than once")
        seen.add(entry_name)
        if entry_name == MANIFEST_FILENAME:
            embedded_manifest = data
            warnings.append(f"{entry_name}: used as ground-truth manifest, not an image")
            continue
        try:
            validate_image(data)
        except (UnsupportedFormat, TruncatedImage) as exc:
            warnings.append(f"{entry_name}: skipped ({exc})")
            continue
        images[entry_name] = data

    if not images:
        raise EmptyDataset(f"archive {name!r} contains no valid images")

    truth: dict[str, str] | None = None
    if embedded_manifest is not None:
        truth = parse_manifest(embedded_manifest)
    if manifest is not None:
        separate = parse_manifest(manifest)
        truth = {**(truth or {}), **separate}
    if truth is not None:
        unknown = sorted(set(truth) - set(images))
        if unknown:
            raise ManifestMismatch(
                f"manifest references files absent from the archive: {unknown[:5]}")
        unlabeled = sorted(set(images) - set(truth))
        if unlabeled:
            raise ManifestMismatch(
                f"manifest is missing rows for {len(unlabeled)} file(s), "
                f"e.g. {unlabeled[0]!r}")

    patches = []
    for filename in sorted(images):
        data = images[filename]
        width, height, fmt = validate_image(data)
        content_hash = hashlib.sha256(data).hexdigest()
        patch_id = hashlib.sha256(
            filename.encode("utf-8") + b"\x1f" + data).hexdigest()[:16]
        patches.append(ImagePatch(
            patch_id=patch_id,
            filename=filename,
            width=width,
            height=height,
            format=fmt,
            content_hash=content_hash,
            ground_truth=truth.get(filename) if truth else None,
        ))

    dataset = Dataset(
        dataset_id=dataset_id or uuid4().hex,
        name=name,
        patches=tuple(patches),
        created_at=created_at or datetime.now(timezone.utc),
    )
    return IngestResult(dataset=dataset, warnings=warnings,
                        contents={p.filename: images[p.filename] for p in patches})
