"""Command-line entry point.

Three subcommands: ``build`` (graph around one work), ``author`` (graph of
an author's works), and ``serve`` (local HTTP server plus viewer).  The
requested artifact is the only thing written to stdout; every log line
goes to stderr.  Exit codes: 0 success, 2 usage error, 3 not found,
4 transport failure or busy port.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .builder import GraphConfig, build_author_graph, build_graph
from .errors import NotFoundError, TransportError, UnknownSelectionError
from .export import export_document, export_dot, format_built_at, render_svg
from .layout import LayoutConfig, layout_graph, style_roles
from .openalex import ClientConfig, OpenAlexClient
from .ranking import RecencyParams
from .server import GraphApp, make_server

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3
EXIT_TRANSPORT = 4

# Test seam: replaced to inject a scripted transport for online-mode tests.
_transport_factory = None


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 2, usage on stderr
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_client_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--offline", metavar="PATH", type=Path, default=None,
                        help="answer everything from this snapshot file; no network")
    parser.add_argument("--mailto", default=None,
                        help="contact email for the polite pool (env: OIGNON_MAILTO)")
    parser.add_argument("--cache-dir", type=Path, default=None,
                        help="response cache directory (env: OIGNON_CACHE_DIR)")
    parser.add_argument("--base-url", default=None, help=argparse.SUPPRESS)


def _add_build_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--roots", type=int, default=20, metavar="K",
                        help="how many ranked root works to admit (default 20)")
    parser.add_argument("--branches", type=int, default=20, metavar="K",
                        help="how many ranked branch works to admit (default 20)")
    parser.add_argument("--branch-seed-cap", type=int, default=100, metavar="N",
                        help="cap on direct citers taken as branch seeds (default 100)")
    parser.add_argument("--pool-cap", type=int, default=2000, metavar="N",
                        help="candidate pool cap per direction (default 2000)")
    parser.add_argument("--half-life", type=float, default=4.0, metavar="H",
                        help="recency weighting half-life in years (default 4)")
    parser.add_argument("--reference-year", type=int, default=None, metavar="Y",
                        help="freeze the year recency is measured from")
    parser.add_argument("--built-at", default=None, metavar="TS",
                        help="freeze the document timestamp (ISO 8601)")


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("document", "dot", "svg"),
                        default="document", help="artifact to emit (default document)")
    parser.add_argument("--out", type=Path, default=None,
                        help="write the artifact here instead of stdout")
    parser.add_argument("--select", default=None, metavar="ID",
                        help="highlight this node's neighbourhood (svg only)")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oignon", description="Citation graph builder")
    sub = parser.add_subparsers(dest="subcommand", metavar="COMMAND")

    p_build = sub.add_parser("build", help="build a graph around one publication")
    p_build.add_argument("--id", dest="work_id", default=None, metavar="WORK_ID")
    p_build.add_argument("--doi", default=None)
    _add_build_flags(p_build)
    _add_client_flags(p_build)
    _add_output_flags(p_build)

    p_author = sub.add_parser("author", help="graph of one author's works")
    p_author.add_argument("--author", required=False, default=None, metavar="QUERY")
    _add_build_flags(p_author)
    _add_client_flags(p_author)
    _add_output_flags(p_author)

    p_serve = sub.add_parser("serve", help="serve the graph and viewer over HTTP")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--id", dest="work_id", default=None, metavar="WORK_ID")
    p_serve.add_argument("--doi", default=None)
    p_serve.add_argument("--document", type=Path, default=None,
                         help="serve this prebuilt document instead of building")
    p_serve.add_argument("--ui-dir", type=Path, default=None,
                         help="directory of viewer assets served at /")
    _add_build_flags(p_serve)
    _add_client_flags(p_serve)
    return parser


def _client_config(args: argparse.Namespace) -> ClientConfig:
    # Flag beats env var beats default; ClientConfig reads the env itself.
    kwargs: dict = {}
    if args.offline is not None:
        kwargs["offline_snapshot"] = args.offline
    if args.mailto is not None:
        kwargs["mailto"] = args.mailto
    if args.cache_dir is not None:
        kwargs["cache_dir"] = args.cache_dir
    if getattr(args, "base_url", None):
        kwargs["base_url"] = args.base_url
    return ClientConfig(**kwargs)


def _graph_config(args: argparse.Namespace) -> GraphConfig:
    recency_kwargs: dict = {"half_life": args.half_life}
    if args.reference_year is not None:
        recency_kwargs["reference_year"] = args.reference_year
    return GraphConfig(
        top_roots_k=args.roots,
        top_branches_k=args.branches,
        branch_seed_cap=args.branch_seed_cap,
        candidate_pool_cap=args.pool_cap,
        recency=RecencyParams(**recency_kwargs),
    )


def _make_client(args: argparse.Namespace) -> OpenAlexClient:
    config = _client_config(args)
    transport = None
    if _transport_factory is not None and config.offline_snapshot is None:
        transport = _transport_factory()
    return OpenAlexClient(config, transport=transport)


def _emit(data: bytes, out: Path | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(data)
        logger.info("wrote %d bytes to %s", len(data), out)


def _render_artifact(args: argparse.Namespace, graph, graph_config: GraphConfig) -> bytes:
    layout_config = LayoutConfig()
    layouted = layout_graph(graph, layout_config)
    if args.format == "dot":
        return export_dot(graph).encode("utf-8")
    if args.format == "svg":
        styles = style_roles(graph, selected=args.select)
        return render_svg(layouted, styles, layout_config).encode("utf-8")
    built_at = args.built_at if args.built_at else format_built_at()
    return export_document(layouted, graph, graph_config, layout_config, built_at=built_at)


def _cmd_build(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if bool(args.work_id) == bool(args.doi):
        parser.error("build needs exactly one of --id or --doi")
    identifier = args.work_id or args.doi
    client = _make_client(args)
    graph_config = _graph_config(args)
    graph = build_graph(identifier, graph_config, client)
    _emit(_render_artifact(args, graph, graph_config), args.out)
    return EXIT_OK


def _cmd_author(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if not args.author:
        parser.error("author needs --author QUERY")
    client = _make_client(args)
    graph_config = _graph_config(args)
    graph = build_author_graph(args.author, graph_config, client)
    _emit(_render_artifact(args, graph, graph_config), args.out)
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    graph_config = _graph_config(args)
    layout_config = LayoutConfig()
    built_at = args.built_at if args.built_at else format_built_at()
    base_identifier = args.work_id or args.doi

    def rebuild(identifier: str | None, overrides: dict) -> bytes:
        # Fresh client per build keeps document diagnostics deterministic.
        client = _make_client(args)
        config = _apply_overrides(graph_config, overrides)
        target = identifier or base_identifier
        if not target:
            raise NotFoundError("no identifier to build from")
        graph = build_graph(target, config, client)
        layouted = layout_graph(graph, layout_config)
        return export_document(layouted, graph, config, layout_config, built_at=built_at)

    if args.document is not None:
        document = args.document.read_bytes()
    elif base_identifier:
        document = rebuild(base_identifier, {})
    else:
        parser.error("serve needs --document or one of --id/--doi")

    app = GraphApp(document, rebuild=rebuild, ui_dir=args.ui_dir)
    try:
        server = make_server(app, host=args.host, port=args.port)
    except OSError as exc:
        logger.error("cannot bind %s:%d: %s", args.host, args.port, exc)
        return EXIT_TRANSPORT
    logger.info("serving on http://%s:%d/", *server.server_address[:2])
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        logger.info("shutting down")
    finally:
        server.server_close()
    return EXIT_OK


def _apply_overrides(base: GraphConfig, overrides: dict) -> GraphConfig:
    """Per-request knobs for POST /api/build; unknown keys are ignored."""
    recency = base.recency
    if "half_life" in overrides or "reference_year" in overrides:
        recency = RecencyParams(
            half_life=float(overrides.get("half_life", recency.half_life)),
            reference_year=int(overrides.get("reference_year", recency.reference_year)),
        )
    return GraphConfig(
        top_roots_k=int(overrides.get("roots", base.top_roots_k)),
        top_branches_k=int(overrides.get("branches", base.top_branches_k)),
        branch_seed_cap=int(overrides.get("branch_seed_cap", base.branch_seed_cap)),
        candidate_pool_cap=int(overrides.get("candidate_pool_cap", base.candidate_pool_cap)),
        recency=recency,
    )


_COMMANDS = {
    "build": _cmd_build,
    "author": _cmd_author,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s"
    )
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if not args.subcommand:
        parser.print_usage(sys.stderr)
        print("oignon: error: a subcommand is required", file=sys.stderr)
        return EXIT_USAGE

    try:
        return _COMMANDS[args.subcommand](args, parser)
    except SystemExit as exc:  # parser.error inside a command
        return int(exc.code or 0)
    except UnknownSelectionError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except NotFoundError as exc:
        logger.error("%s", exc)
        return EXIT_NOT_FOUND
    except TransportError as exc:
        logger.error("%s", exc)
        return EXIT_TRANSPORT
    except (ValueError, OSError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
