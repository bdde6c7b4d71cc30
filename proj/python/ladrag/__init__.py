"""Layout-aware dynamic retrieval over visually rich documents.

Python surface of the C++ core: document graphs, the declarative graph
query engine, Louvain communities, dense/BM25 search, the retrieval agent,
and the PR/IPR evaluation metrics.
"""

from ladrag._core import (  # noqa: F401
    Bm25Index,
    DocumentGraph,
    Gateway,
    LadragError,
    NeuralIndex,
    bm25_search,
    build_bm25_index,
    build_neural_index,
    contextualize,
    execute_query,
    graph_from_json,
    ingest_pre_extracted,
    irrelevant_pages_ratio,
    load_graph,
    load_neural_index,
    louvain_partition,
    neighbors,
    page_topk,
    perfect_recall,
    retrieve,
    save_graph,
    save_neural_index,
    semantic_search,
    validate_graph,
)

__version__ = "0.1.0"
