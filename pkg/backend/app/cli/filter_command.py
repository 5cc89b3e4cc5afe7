from app.core.logging import get_logger
from app.services.pipeline_service import get_pipeline_service, load_filter_config

logger = get_logger()


def register(subparsers) -> None:
    parser = subparsers.add_parser("filter", help="Build a filtered network and behavioral vectors")
    parser.add_argument("--follows", required=True, help="follower<TAB>followee file")
    parser.add_argument("--ratings", default=None, help="user<TAB>item<TAB>rating file (ratings-type dataset)")
    parser.add_argument("--config", default=None, help="key=value file with filter thresholds")
    parser.add_argument("--movie-max-popularity", type=int, default=None)
    parser.add_argument("--min-ratings", type=int, default=None)
    parser.add_argument("--min-friends", type=int, default=None)
    parser.add_argument("--celeb-threshold", type=int, default=None)
    parser.add_argument("--min-noncelebrity-friends", type=int, default=None)
    parser.add_argument("--out", required=True, help="Output dataset directory")
    parser.set_defaults(handler=run)


def run(args) -> int:
    config = load_filter_config(
        args.config,
        {
            "movie_max_popularity": args.movie_max_popularity,
            "min_ratings": args.min_ratings,
            "min_friends": args.min_friends,
            "celeb_threshold": args.celeb_threshold,
            "min_noncelebrity_friends": args.min_noncelebrity_friends,
        },
    )
    dataset = get_pipeline_service(config).run(args.follows, args.out, ratings_path=args.ratings)
    print(
        f"{dataset.graph.node_count} users, {dataset.graph.edge_count} friendships, "
        f"{len(dataset.columns)} vector dimensions -> {args.out}"
    )
    return 0
