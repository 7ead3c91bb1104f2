"""Homology groups of filtrations of cell complexes built from images and point clouds."""

from .builders_cloud import PointCloud, density_radius_bifiltration, rips_complex, rips_filtration
from .builders_image import GrayscaleImage, binary_cubical, default_thresholds, threshold_filtration
from .complex_core import Cell, CellComplex, Filtration, InputError, validate
from .diagram_metrics import bottleneck_distance, stability_report, sup_norm_diff
from .filtration_groups import (
    FiltrationHomology,
    PersistenceDiagram,
    barcode,
    barcode_by_reduction,
    filtration_homology,
    noise_group_of_complex,
    noise_group_of_filtration,
    persistence_of,
    persistent_group_of_complex,
    persistent_group_of_filtration,
)
from .homology_engine import homology_basis, induced_map, mapping_cone
from .multiparam import Bifiltration, bifiltration_homology, persistent_group_of_bifiltration

__version__ = "0.1.0"
