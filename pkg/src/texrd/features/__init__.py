from .coherence import coherence_map, temporal_coherence_stats
from .extract import (
    FEATURE_COLUMNS,
    FEATURE_NAMES,
    N_FEATURES,
    FeatureConfig,
    FeatureVector,
    extract_gop_features,
)
from .flow import FlowField, FlowParams, farneback_flow, flow_statistics
from .glcm import Glcm, GlcmDescriptors, compute_glcm, glcm_descriptors
from .moments import StatMoments, stat_moments
from .ncc import ncc_peak_stats, ncc_peaks
from .pyramid import laplacian_pyramid, nlp_distance
from .wavelet import alpd, haar_wavedec2
