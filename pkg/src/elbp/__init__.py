"""Enhanced Local Binary Patterns: descriptors, face models and identification."""
from .descriptor import CodeImage, OperatorParams, PointSetTopology, code_image, elbp_code, lbp_code
from .facemodel import FaceModel, build_face_model, build_histograms, load_model, save_model
from .imaging import GrayImage, crop_by_eyes, gen_texture, load_image, resize_bilinear, save_pgm
from .matcher import Gallery, identify, intersection_similarity

__all__ = [
    "CodeImage", "FaceModel", "Gallery", "GrayImage", "OperatorParams", "PointSetTopology",
    "build_face_model", "build_histograms", "code_image", "crop_by_eyes", "elbp_code",
    "gen_texture", "identify", "intersection_similarity", "lbp_code", "load_image",
    "load_model", "resize_bilinear", "save_model", "save_pgm",
]
