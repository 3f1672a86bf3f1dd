"""Graphviz export of machines and state graphs."""

from typing import Optional

import networkx as nx

from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.explore.state_space import StateGraph
from cfsm_verify.src.model.protocol import Machine

try:
    import pydot
except ImportError:
    pydot = None


def _require_pydot() -> None:
    if pydot is None:
        raise ImportError(
            "DOT export requires `pydot`. Install it with `pip install pydot`."
        )


def _quoted(graph: nx.MultiDiGraph) -> nx.MultiDiGraph:
    # pydot mangles unquoted names containing `:` or `,`.
    return nx.relabel_nodes(graph, {n: f'"{n}"' for n in graph.nodes})


@cfsm_verify_export("cfsm_verify.explore.machine_to_dot")
def machine_to_dot(machine: Machine) -> str:
    """The state diagram of `machine` in DOT."""
    _require_pydot()
    graph = nx.MultiDiGraph(name=f"node_{machine.node}")
    graph.add_nodes_from(machine.reachable_states())
    for t in machine.transitions:
        graph.add_edge(t.source, t.target, label=f'"{t.action}"')
    graph.nodes[machine.initial]["shape"] = "doublecircle"
    return nx.nx_pydot.to_pydot(_quoted(graph)).to_string()


@cfsm_verify_export("cfsm_verify.explore.state_graph_to_dot")
def state_graph_to_dot(sg: StateGraph, limit: Optional[int] = None) -> str:
    """The explored state graph in DOT, labelled with the global states.

    Args:
        sg: The explored graph.
        limit: Only the first `limit` states in discovery order.
    """
    _require_pydot()
    keep = range(len(sg.states) if limit is None else min(limit, len(sg)))
    graph = nx.MultiDiGraph(name=sg.protocol.name)
    for i in keep:
        graph.add_node(i, label=sg.states[i].format(sg.protocol))
    for edge in sg.edges:
        if edge.source in graph and edge.target in graph:
            graph.add_edge(
                edge.source, edge.target, label=f"{edge.node}:{edge.action}"
            )
    graph.nodes[0]["shape"] = "box"
    labelled = nx.relabel_nodes(graph, {i: f"s{i}" for i in graph.nodes})
    for _, _, data in labelled.edges(data=True):
        data["label"] = f'"{data["label"]}"'
    for _, data in labelled.nodes(data=True):
        data["label"] = f'"{data["label"]}"'
    return nx.nx_pydot.to_pydot(labelled).to_string()
