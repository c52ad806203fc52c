from .colouring import chromatic_oracle, chromatic_via_expression, colour_via_expression
from .expr import (
    Create,
    Join,
    KExpression,
    LabelledGraph,
    Relabel,
    Union,
    add_false_twin,
    add_vertex,
    evaluate,
    expr_clique,
    expr_for_max_degree_2,
    expr_independent,
    expr_star,
    external_ids,
    format_expr,
    label_universe,
    parse_expr,
    remap_ids,
    substitute_labels,
    union_all,
    validate_against,
    width,
)
from .oracle import exact_cliquewidth

__all__ = [
    "Create",
    "Join",
    "KExpression",
    "LabelledGraph",
    "Relabel",
    "Union",
    "add_false_twin",
    "add_vertex",
    "chromatic_oracle",
    "chromatic_via_expression",
    "colour_via_expression",
    "evaluate",
    "exact_cliquewidth",
    "expr_clique",
    "expr_for_max_degree_2",
    "expr_independent",
    "expr_star",
    "external_ids",
    "format_expr",
    "label_universe",
    "parse_expr",
    "remap_ids",
    "substitute_labels",
    "union_all",
    "validate_against",
    "width",
]
