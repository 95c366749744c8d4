"""Streaming influence tracking over dynamic weighted digraphs."""
from .graph import SELF, DynamicGraph, Model, UpdateDelta, WeightUpdate
from .report import TrackerReport
from .rrindex import DegreeBucketList, RRCollection
from .threshold import ThresholdConfig, ThresholdTracker, required_sample_size
from .topk import TopKConfig, TopKTracker, refined_filter_threshold
from .tracker import InfluenceTracker

__all__ = [
    "SELF",
    "DegreeBucketList",
    "DynamicGraph",
    "InfluenceTracker",
    "Model",
    "RRCollection",
    "ThresholdConfig",
    "ThresholdTracker",
    "TopKConfig",
    "TopKTracker",
    "TrackerReport",
    "UpdateDelta",
    "WeightUpdate",
    "refined_filter_threshold",
    "required_sample_size",
]

__version__ = "0.1.0"
