from .slices import ScanRow, Slice, delta_scan, make_slices, slice_constituent
from .daugavet import (
    ConditionIIIReport,
    ConditionViolation,
    DaugavetVerdict,
    WitnessReport,
    condition_iii_check,
    daugavet_witness_search,
    denting_set,
    distance_to_molecule,
    is_daugavet,
    is_denting,
    max_distance_in_slice,
)
from .descent import ShrinkStep, denting_descent, descent_path, shrink_step
