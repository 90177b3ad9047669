"""
Dataset ingestion: image archives in, validated datasets out
============================================================

Datasets arrive as .zip or .tar uploads. Every entry is header-validated
(PNG or JPEG), non-image files become warnings, and an optional
filename,label manifest attaches ground truth for training studies.
"""

import io
import zipfile

from PIL import Image

from swipelabel import ArchiveFormat, ingest_archive, validate_image


def png_bytes(width, height, color):
    buf = io.BytesIO()
    Image.new("RGB", (width, height), color).save(buf, format="PNG")
    return buf.getvalue()


# validate_image reads only the header, never the pixel data
sample = png_bytes(128, 128, (140, 60, 60))
print("validate_image:", validate_image(sample))

# Build a small archive in memory: three patches, a stray text file, and an
# embedded ground-truth manifest.
buf = io.BytesIO()
with zipfile.ZipFile(buf, "w") as zf:
    zf.writestr("patch_b.png", png_bytes(128, 128, (150, 70, 70)))
    zf.writestr("patch_a.png", png_bytes(128, 128, (60, 130, 60)))
    zf.writestr("patch_c.png", png_bytes(64, 64, (60, 60, 140)))
    zf.writestr("notes.txt", b"stray file, not an image")
    zf.writestr("labels.csv",
                b"filename,label\n"
                b"patch_a.png,normal\npatch_b.png,atypical\npatch_c.png,normal\n")

result = ingest_archive(buf.getvalue(), ArchiveFormat.ZIP, name="demo patches")

print(f"\ndataset {result.dataset.dataset_id} ({result.dataset.name})")
for patch in result.dataset.patches:   # sorted by filename
    print(f"  {patch.filename:12} {patch.width}x{patch.height} "
          f"{patch.format.value:4} truth={patch.ground_truth} "
          f"sha256={patch.content_hash[:12]}…")
print("warnings:")
for warning in result.warnings:
    print("  -", warning)
