from .anf import FragmentedGraphError, HopPlot, effective_diameter, hop_plot_anf, hop_plot_exact
from .clustering import Clustering, clustering_coefficients, clustering_mixing, triangle_counts
from .degree import (
    DegenerateTailError,
    Profile,
    UndefinedMixing,
    degree_mixing,
    degree_profiles,
    pearson,
    powerlaw_exponent,
)
from .vector import (
    DIRECTED_MEASURES,
    UNDIRECTED_MEASURES,
    MeasureDetails,
    MeasureVector,
    measure_names,
    measure_vector,
)
