from .model_types import GroundTruth, NoiseKind, RngSpec
from .models import MODEL_IDS, get_model, model_catalog
from .sampling import draw_sample
