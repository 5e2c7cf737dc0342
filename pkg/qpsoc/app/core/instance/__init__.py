from .parser import SparseQP, parse_instance, load_instance, dump_instance, make_qp
from .graph import LoopGraph, build_graph, neighborhood
