from .datasets import (
    FoldSplit,
    RatingDataset,
    SocialDataset,
    TrainingData,
    folds,
    make_training_data,
)
from .loader import (
    DEFAULT_MIN_INTERACTIONS,
    filter_interactions,
    load,
    load_social,
    read_id_map,
    read_ratings,
    read_social,
)
from .metrics import rmse
from .synth import sample_social, synth, tie_count
from .writers import write_id_map, write_ratings, write_social

__all__ = [
    "FoldSplit",
    "RatingDataset",
    "SocialDataset",
    "TrainingData",
    "folds",
    "make_training_data",
    "DEFAULT_MIN_INTERACTIONS",
    "filter_interactions",
    "load",
    "load_social",
    "read_id_map",
    "read_ratings",
    "read_social",
    "rmse",
    "sample_social",
    "synth",
    "tie_count",
    "write_id_map",
    "write_ratings",
    "write_social",
]
