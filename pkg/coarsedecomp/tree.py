# coarsedecomp/tree.py

"""
This module defines finite strategy trees: transcript summaries of played
decomposition games, with one child per challenge actually played.
"""

import logging

import networkx as nx

from .decomposition import DecompositionCertificate, VerificationReport, verify_certificate
from .errors import MalformedCertificateError, MetricError
from .metric import INF, format_rational, to_rational

logger = logging.getLogger(__name__)


class StrategyNode:
    """
    A vertex of a strategy tree.

    Attributes:
        family (MetricFamily): The family labelling the vertex.
        r (Fraction): Challenge on the edge from the parent (None at the root).
        round (GameRound): The round decomposing the parent's family into this one.
        bound (Fraction): Diameter bound claimed at a leaf.
        children (list): Child nodes in the order they were added.
    """

    def __init__(self, family, r=None, round_=None, bound=None):
        self.family = family
        self.r = None if r is None else to_rational(r)
        self.round = round_
        self.bound = None if bound is None else to_rational(bound)
        self.children = []

    def add_child(self, child_node):
        """
        Adds a child node to the current node.
        """
        self.children.append(child_node)

    def child(self, r):
        """Returns the child reached by challenge r, or None."""
        r = to_rational(r)
        return next((c for c in self.children if c.r == r), None)

    def is_leaf(self):
        """
        Check if the node is a leaf node.

        Returns:
            bool: True if the node has no children, False otherwise.
        """
        return len(self.children) == 0


class StrategyTree:
    """
    A finite rooted tree of families joined by verified decomposition rounds.
    """

    def __init__(self, root):
        self.root = root

    @classmethod
    def from_certificates(cls, certs):
        """
        Merges game transcripts that start from the same family.

        Each certificate becomes a root-to-leaf path whose edges carry its
        rounds; paths share a prefix while their challenges agree. The last
        vertex of each path is labelled with the certificate's bound.

        Args:
            certs (list): DecompositionCertificates over one initial family.

        Returns:
            StrategyTree: The merged tree.

        Raises:
            MalformedCertificateError: If the certificates start from different
                families, or answer a shared challenge with different families.
        """
        certs = list(certs)
        if not certs:
            raise MalformedCertificateError("a strategy tree needs at least one certificate")
        root = StrategyNode(certs[0].initial)
        for cert in certs:
            if tuple(cert.initial) != tuple(root.family):
                raise MalformedCertificateError("certificates start from different families")
            node = root
            path = []
            for round_ in cert.rounds:
                path.append(format_rational(round_.r))
                family = round_.next_family()
                next_node = node.child(round_.r)
                if next_node is None:
                    next_node = StrategyNode(family, round_.r, round_)
                    node.add_child(next_node)
                elif tuple(next_node.family) != tuple(family):
                    raise MalformedCertificateError(
                        f"certificates answer challenges {path} with different families")
                node = next_node
            if node.bound is None or cert.bound > node.bound:
                node.bound = cert.bound
        logger.info("Strategy tree from %d certificates: rank %d", len(certs), tree_rank(root))
        return cls(root)

    def nodes(self, node=None):
        """Yields every node in depth-first order."""
        node = node or self.root
        yield node
        for child in node.children:
            yield from self.nodes(child)

    def to_graph(self):
        """
        Returns the tree as a networkx DiGraph on node ids, edges labelled by challenge.
        """
        graph = nx.DiGraph()
        for node in self.nodes():
            graph.add_node(id(node))
            for child in node.children:
                graph.add_edge(id(node), id(child), r=child.r)
        return graph

    def render(self, node=None, level=0):
        """
        Renders the tree as indented lines, one per vertex.

        Args:
            node (StrategyNode): The current node. Defaults to the root node.
            level (int): The current level in the tree. Defaults to 0.

        Returns:
            str: The tree structure.
        """
        if node is None:
            node = self.root
        indent = " " * (level * 4)
        label = "root" if node.r is None else f"r={format_rational(node.r)}"
        line = f"{indent}- {label}: {len(node.family)} members"
        if node.is_leaf() and node.bound is not None:
            line += f", bound {format_rational(node.bound)}"
        lines = [line]
        for child in node.children:
            lines.append(self.render(child, level + 1))
        return "\n".join(lines)


def tree_rank(tree):
    """
    The rank of a finite strategy tree: 0 at leaves, one more than the
    largest child rank elsewhere.

    Args:
        tree (StrategyTree or StrategyNode): The tree or a subtree.

    Returns:
        int: The rank.
    """
    node = tree.root if isinstance(tree, StrategyTree) else tree
    return max((tree_rank(child) + 1 for child in node.children), default=0)


def verify_tree(tree):
    """
    Re-checks a strategy tree: every edge is a valid round at its challenge
    and every leaf family is bounded by its label.

    Returns:
        VerificationReport: Violations carry the path of challenges to the
        offending vertex.
    """
    report = VerificationReport(depth=tree_rank(tree))

    def visit(node, path):
        for child in node.children:
            if child.round is None or child.round.r != child.r:
                raise MalformedCertificateError(
                    f"edge {path + [child.r]} does not carry its round")
            edge = DecompositionCertificate(node.family, (child.round,), INF)
            for violation in verify_certificate(edge).violations:
                report.add(violation.pop("code"),
                           path=[format_rational(r) for r in path + [child.r]], **violation)
            visit(child, path + [child.r])
        if node.is_leaf():
            bound = INF if node.bound is None else node.bound
            try:
                size = node.family.max_diameter()
            except MetricError:
                size = INF
            if node.bound is None or size > bound:
                report.add("BOUND_VIOLATION", path=[format_rational(r) for r in path],
                           diameter=format_rational(size),
                           bound=format_rational(bound))

    visit(tree.root, [])
    logger.info("Strategy tree of rank %d: %s", report.depth,
                "valid" if report.valid else "invalid")
    return report
