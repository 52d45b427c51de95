from ._core import (
    DataError,
    IQShotTable,
    __version__,
    amplitude_encode,
    angle_encode,
    swaptest_distance,
    batch_distances,
    fit,
    predict,
    assignment_fidelity,
    fowlkes_mallows,
    cross_validate,
    pearson,
    synthesize,
    assemble_datasets,
    analyze_pair,
    flag_crosstalk,
    classical_cost,
    quantum_cost,
    expected_jobs_per_iteration,
)
