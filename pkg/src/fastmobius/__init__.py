"""Fast Mobius transform for partial and integrated information decomposition.

A closed-form Mobius function over the antichain (redundancy) lattice turns
information decomposition into sparse matrix-vector products, replacing the
recursive equation-solving that limits naive implementations to 3 variables.
"""

from .lattice import (
    Antichain,
    AntichainTable,
    BottomFamily,
    CapacityError,
    DownSet,
    antichain_leq,
    complement,
    enumerate_antichains,
    format_source_set,
    ideal_of,
    is_antichain,
    join,
    meet,
    source_indices,
    source_set,
)
from .mobius import (
    AtomVector,
    DoubleLatticeMatrix,
    DoubleLatticeVector,
    LatticeVector,
    RedundancyVector,
    SparseMobiusMatrix,
    atom_label,
    build_mobius_matrix,
    cumulate_atoms,
    export_matrix_text,
    load_matrix,
    load_matrix_file,
    mobius_fast,
    mobius_recursive,
    parse_atom_label,
    phiid_atoms,
    phiid_mobius,
    pid_atoms,
    save_matrix,
    save_matrix_file,
    top_synergy_atom,
    zeta_matrix,
)
from .measures import (
    CANONICAL_NAMES,
    JointDistribution,
    canonical_distribution,
    empirical_distribution,
    i_min,
    i_mmi,
    median_binarize,
    mutual_information,
    phiid_mmi,
    phiid_redundancy_vector,
    redundancy_vector,
)
from .dynamics import (
    CATEGORIES,
    CategoryStats,
    CorrectedDecomposition,
    SymbolicSequence,
    TransitionModel,
    category_members,
    category_report,
    classify_atom,
    dedupe_consecutive,
    double_redundancy_vector,
    phiid_from_model,
    redundant_voice_sequence,
    shuffle_null_correction,
    transition_distribution,
)

__version__ = "0.1.0"
