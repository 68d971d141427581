"""End-to-end analysis: wall labeling -> model -> Morse graph -> Conley complex."""

from __future__ import annotations

from dataclasses import dataclass, field

from .blowup import ExtendedGrading, extend_grading
from .conley import ConleyComplex, build_graded_complex, enumerate_connection_matrices, reduce
from .dynamics import Grading, ModelError, MorseGraph, StateTransitionGraph, build_model, grading, morse_graph
from .walls import RookField, WallLabeling, rook_field

__all__ = ["Analysis", "analyze"]


@dataclass
class Analysis:
    """Every intermediate object of one pipeline run."""

    omega: WallLabeling
    phi: RookField
    stg: StateTransitionGraph
    grading: Grading
    morse: MorseGraph
    extended: ExtendedGrading | None = None
    conley: ConleyComplex | None = None
    matrices: list[tuple[int, ...]] | None = field(default=None)

    @property
    def N(self) -> int:
        return self.omega.N

    def node_order(self) -> list[int]:
        """Conley-complex positions sorted by Morse node id, then degree."""
        cc = self.conley
        ids = {nd.scc: nd.id for nd in self.morse.nodes}
        return sorted(range(cc.size), key=lambda i: (ids.get(cc.grade[i], -1), cc.degree[i], i))

    def matrix_json(self, delta) -> dict:
        """Boundary blocks ``k -> k-1`` with rows and columns labeled by Morse node id."""
        cc = self.conley
        ids = {nd.scc: nd.id for nd in self.morse.nodes}
        order = self.node_order()
        out = {}
        for k in range(1, self.N + 1):
            rows = [i for i in order if cc.degree[i] == k - 1]
            cols = [i for i in order if cc.degree[i] == k]
            if rows and cols:
                out[str(k)] = {"rows": [ids[cc.grade[i]] for i in rows],
                               "cols": [ids[cc.grade[i]] for i in cols],
                               "matrix": cc.block(k, delta, rows, cols)}
        return out


def analyze(omega: WallLabeling, model: str = "F3", *, conley: bool = True,
            enumerate_matrices: bool = False, max_bits: int = 20) -> Analysis:
    """Run the pipeline on a wall labeling.

    Conley indices of the Morse nodes are read from the reduced complex and
    stored on the nodes.  ``enumerate_matrices`` lists every connection
    matrix within a budget of ``max_bits`` perturbation pairs.
    """
    model = model.upper()
    if model == "F3" and omega.N > 3:
        raise ModelError("F3 undefined above dimension 3")
    if enumerate_matrices and not conley:
        raise ValueError("enumerating connection matrices needs the Conley complex")
    phi = rook_field(omega)
    stg = build_model(model, phi)
    gr = grading(stg)
    mg = morse_graph(gr, phi)
    res = Analysis(omega, phi, stg, gr, mg)
    if conley:
        res.extended = extend_grading(gr, model)
        res.conley = reduce(build_graded_complex(res.extended))
        for nd in mg.nodes:
            nd.conley_index = res.conley.betti(nd.scc, omega.N)
        if enumerate_matrices:
            res.matrices = enumerate_connection_matrices(res.conley, max_bits)
    return res
