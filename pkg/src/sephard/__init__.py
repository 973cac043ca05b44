"""Reduction chain from CLIQUE to weak membership in the separable set, with numerical oracles."""

from .bloch import BlochVector, GeneratorBasis, bloch_to_density, density_to_bloch, sep_set_geometry, su_generators
from .channels import ChoiOperator, FanoVector, KrausSet, ebp_reduce, fano_decode, fano_encode, jamiolkowski, kraus_from_choi
from .errors import DegenerateInstance, NumericIntegrityError, SephardError, ValidationError
from .graphs import CliqueInstance, Graph, Verdict, parse_graph
from .reduction import RsdfInstance, WmemParams, WoptInstance, clique_to_rsdf, reduce_clique, rsdf_to_wopt, wopt_to_wmem_params

__version__ = "0.1.0"

__all__ = [
    "BlochVector", "GeneratorBasis", "bloch_to_density", "density_to_bloch", "sep_set_geometry", "su_generators",
    "ChoiOperator", "FanoVector", "KrausSet", "ebp_reduce", "fano_decode", "fano_encode", "jamiolkowski",
    "kraus_from_choi", "DegenerateInstance", "NumericIntegrityError", "SephardError", "ValidationError",
    "CliqueInstance", "Graph", "Verdict", "parse_graph", "RsdfInstance", "WmemParams", "WoptInstance",
    "clique_to_rsdf", "reduce_clique", "rsdf_to_wopt", "wopt_to_wmem_params",
]
