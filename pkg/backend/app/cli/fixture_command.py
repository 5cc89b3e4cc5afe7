from app.core.logging import get_logger
from app.services.fixture_service import FixtureConfig, get_fixture_service

logger = get_logger()


def register(subparsers) -> None:
    parser = subparsers.add_parser("fixture", help="Generate a synthetic dataset with planted communities")
    parser.add_argument("--kind", choices=["ratings", "follows"], default="ratings")
    parser.add_argument("--seed", type=int, default=0, help="Generator seed")
    parser.add_argument("--users", type=int, default=FixtureConfig().users)
    parser.add_argument("--communities", type=int, default=FixtureConfig().communities)
    parser.add_argument("--out", required=True, help="Output directory")
    parser.set_defaults(handler=run)


def run(args) -> int:
    config = FixtureConfig(users=args.users, communities=args.communities)
    service = get_fixture_service(config, args.seed)
    if args.kind == "ratings":
        written = service.write_ratings_dataset(args.out)
    else:
        written = service.write_follow_dataset(args.out)
    for path in written:
        print(path)
    return 0
