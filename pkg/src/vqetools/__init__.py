"""vqetools: statevector toolkit for circuit expressivity analysis and
readout-error mitigation.

Exact simulation of parametric circuits (states, analytic tangent vectors,
Pauli expectations, seeded sampling), iterative classification of circuit
parameters into independent and redundant ones, pruning of redundancies and
of the global-phase symmetry, construction of minimal maximally-expressive
ansatz candidates, polynomial-cost inversion of per-qubit readout bit-flip
noise, and the simulated experiments tying it all together.
"""

from .circuits import (
    GateSpec,
    ParametricCircuit,
    circuit_from_dict,
    circuit_to_dict,
    load_circuit,
    save_circuit,
    single_qubit_euler_circuit,
)
from .experiments import (
    EigenvalueScanResult,
    HistogramResult,
    ScalingResult,
    TransverseIsingModel,
    build_ti_hamiltonian,
    eigenvalue_shot_experiment,
    exact_ground_state,
    haar_random_state,
    histogram_experiment,
    planted_redundancy_circuit,
    power_law_fit,
    scaling_experiment,
    vqe_minimize,
)
from .expressivity import (
    ExpressivityReport,
    ParameterVerdict,
    best_approximation_bounds,
    classify_parameters,
    dim_mod_phase,
    dim_with_phase,
    estimate_gram_entry,
    gram_matrix,
    inductive_ansatz,
    remove_phase_symmetry,
    remove_redundant,
    remove_symmetry,
    sampled_epsilon,
)
from .mitigation import (
    CalibrationRecord,
    MitigatedOperator,
    ReadoutNoiseModel,
    SingularGammaError,
    apply_readout_noise,
    calibrate,
    correct_operator,
    forward_noisy_operator,
    gamma,
    mitigated_expectation,
    mitigated_expectation_from_distribution,
    mitigated_expectation_stderr,
    noisy_probability_vector,
    preprocess_hamiltonian,
    raw_expectation,
    simulated_executor,
    t1_correct,
)
from .paulis import PauliSum, diagonal_profile, split_measurement_settings
from .rng import DEFAULT_SEED, child_seed, stream
from .simulate import (
    ShotCounts,
    apply_circuit,
    evaluate_circuit,
    expectation,
    sample_measurements,
    tangent_vector,
)

__version__ = "0.1.0"
