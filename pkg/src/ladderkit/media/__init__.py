from ladderkit.media.descriptors import DatasetDescriptor, dataset_descriptors
from ladderkit.media.features import FEATURE_NAMES, FeatureVector, extract_features
from ladderkit.media.io import (
    ArraySequence,
    FileSequence,
    Frame,
    ManifestEntry,
    Sequence,
    VideoFormatError,
    load_manifest,
    open_sequence,
    write_y4m,
    write_yuv,
)
from ladderkit.media.quality import PSNR_CAP_DB, PsnrReport, psnr
from ladderkit.media.resample import lanczos3_resample, resample_plane

__all__ = [
    "ArraySequence", "DatasetDescriptor", "FEATURE_NAMES", "FeatureVector",
    "FileSequence", "Frame", "ManifestEntry", "PSNR_CAP_DB", "PsnrReport",
    "Sequence", "VideoFormatError", "dataset_descriptors", "extract_features",
    "lanczos3_resample", "load_manifest", "open_sequence", "psnr",
    "resample_plane", "write_y4m", "write_yuv",
]
