"""Command-line driver for seeded, reproducible protocol and attack runs.

One subcommand per experiment: honest-run, guess-attack, wrong-login-demo,
dos-demo. Every run emits a JSON report (schema in docs/report.schema.json)
whose fields, wall time aside, are a pure function of the configuration.

Exit codes: 0 the expected outcome reproduced, 2 the experiment ran but
contradicted the expected outcome, 3 configuration or I/O error.
"""

import argparse
import json
import sys
import time

from .adversary import (
    AttackReport,
    Dictionary,
    ExperimentInvalid,
    ExtractedCard,
    Transcript,
    dos_experiment,
    offline_guess,
    wrong_login_experiment,
)
from .chaotic import DEFAULT_PRIME, backend_name
from .primitives import DEFAULT_WIDTH, LogicalClock, OpCounts, RandomSource
from .protocol import (
    DEFAULT_DELTA_T,
    LoginRequest,
    LoginSession,
    registration,
    run_login_session,
    server_setup,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONTRADICTED = 2
EXIT_CONFIG = 3

_DEFAULT_IDENTITY = "alice"
_DEFAULT_PASSWORD = "sunrise77"


class ConfigError(Exception):
    """Bad flags, unreadable files, or an invalid fixture."""


class RunConfig:
    """Resolved configuration of one CLI invocation, echoed into the report."""

    def __init__(
        self,
        seed: int = 42,
        width: int = DEFAULT_WIDTH,
        prime: int = DEFAULT_PRIME,
        delta_t: int = DEFAULT_DELTA_T,
        channel_delay: int = 1,
        dictionary: str | None = None,
        identity: str = _DEFAULT_IDENTITY,
        password: str = _DEFAULT_PASSWORD,
        wrong_password: str | None = None,
        wrong_old_password: str | None = None,
        new_password: str | None = None,
        correct_old_password: bool = False,
        expect_miss: bool = False,
        out: str | None = None,
    ):
        self.seed = seed
        self.width = width
        self.prime = prime
        self.delta_t = delta_t
        self.channel_delay = channel_delay
        self.dictionary = dictionary
        self.identity = identity
        self.password = password
        self.wrong_password = wrong_password if wrong_password is not None else password + "-typo"
        self.wrong_old_password = (
            wrong_old_password if wrong_old_password is not None else password + "-typo"
        )
        self.new_password = new_password if new_password is not None else password + "-new"
        self.correct_old_password = correct_old_password
        self.expect_miss = expect_miss
        self.out = out

    def echo(self, fixture_keys: tuple, extra: dict | None = None) -> dict:
        fixture = {"identity": self.identity, "password": self.password}
        for key in fixture_keys:
            fixture[key] = getattr(self, key)
        config = {
            "seed": self.seed,
            "width": self.width,
            "prime": str(self.prime),
            "delta_t": self.delta_t,
            "channel_delay": self.channel_delay,
            "dictionary": self.dictionary,
            "fixture": fixture,
        }
        if extra:
            config.update(extra)
        return config


def _setup(config: RunConfig):
    """Common fixture: server, protocol rng (a distinct stream), clock, card."""
    server = server_setup(
        config.seed, width=config.width, prime=config.prime, delta_t=config.delta_t
    )
    rng = RandomSource(config.seed + 1)
    clock = LogicalClock()
    card = registration(server, config.identity, config.password, rng)
    return server, rng, clock, card


def _message_json(message) -> dict:
    if isinstance(message, LoginRequest):
        return {
            "type": "login_request",
            "im1": message.im1.hex(),
            "im2": message.im2.hex(),
            "tuk": str(message.tuk),
            "x1": message.x1.hex(),
            "t1": message.t1.ticks,
        }
    return {
        "type": "login_response",
        "y1": message.y1.hex(),
        "y2": message.y2.hex(),
        "y3": message.y3.hex(),
        "tvk": str(message.tvk),
        "t2": message.t2.ticks,
    }


def _transcript_json(events) -> list:
    return [
        {
            "direction": e.direction,
            "sent_at": e.sent_at.ticks,
            "delivered_at": e.delivered_at.ticks,
            "message": _message_json(e.message),
        }
        for e in events
    ]


def _session_json(index: int, session: LoginSession, user_counts: OpCounts, server_counts: OpCounts) -> dict:
    return {
        "index": index,
        "keys_match": session.keys_match,
        "user_key": session.user_key.hex() if session.user_key else None,
        "server_key": session.server_key.hex() if session.server_key else None,
        "reject": (
            None
            if session.ok
            else {"by": session.rejected_by, "reason": session.reject.reason.value}
        ),
        "op_counts": {"user": user_counts.as_dict(), "server": server_counts.as_dict()},
        "transcript": _transcript_json(session.events),
    }


def _report_head(command: str, config_echo: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config_echo,
        "digest": "sha-256",
        "backend": backend_name,
    }


def cmd_honest_run(config: RunConfig) -> dict:
    """Setup, registration, and two consecutive logins (pseudonym refresh)."""
    start = time.perf_counter()
    server, rng, clock, card = _setup(config)
    sessions = []
    all_ok = True
    for index in (1, 2):
        user_counts, server_counts = OpCounts(), OpCounts()
        session = run_login_session(
            server, card, config.password, clock, rng,
            channel_delay=config.channel_delay,
            user_counts=user_counts, server_counts=server_counts,
        )
        card = session.card
        sessions.append(_session_json(index, session, user_counts, server_counts))
        all_ok = all_ok and session.ok and session.keys_match
    report = _report_head("honest-run", config.echo(()))
    report["sessions"] = sessions
    report["all_sessions_ok"] = all_ok
    report["exit_status"] = EXIT_OK if all_ok else EXIT_CONTRADICTED
    report["wall_time_s"] = time.perf_counter() - start
    return report


def cmd_guess_attack(config: RunConfig) -> dict:
    """Eavesdrop one honest login, extract the card, scan the dictionary."""
    start = time.perf_counter()
    if config.dictionary is None:
        raise ConfigError("guess-attack requires --dict")
    try:
        dictionary = Dictionary.from_file(config.dictionary)
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    server, rng, clock, card = _setup(config)
    extracted = ExtractedCard.from_card(card)  # same card state the login uses
    user_counts, server_counts = OpCounts(), OpCounts()
    session = run_login_session(
        server, card, config.password, clock, rng,
        channel_delay=config.channel_delay,
        user_counts=user_counts, server_counts=server_counts,
    )
    transcript = Transcript.from_events(session.events)
    m1 = transcript.login_requests()[0]
    attack = offline_guess(extracted, m1, dictionary)
    if config.expect_miss:
        as_expected = attack.recovered is None and attack.guesses == len(dictionary)
    else:
        as_expected = attack.recovered == config.password.encode("utf-8")
    report = _report_head("guess-attack", config.echo((), {"expect_miss": config.expect_miss}))
    report["session"] = _session_json(1, session, user_counts, server_counts)
    report["attack"] = {
        "outcome": "recovered" if attack.recovered is not None else "none",
        "recovered_password": (
            attack.recovered.decode("utf-8") if attack.recovered is not None else None
        ),
        "guesses": attack.guesses,
        "dictionary_size": len(dictionary),
        "multiple_matches": attack.multiple_matches,
        "op_counts": attack.counts.as_dict(),
        "wall_time_s": attack.wall_time_s,
    }
    report["as_expected"] = as_expected
    report["exit_status"] = EXIT_OK if as_expected else EXIT_CONTRADICTED
    report["wall_time_s"] = time.perf_counter() - start
    return report


_WASTED_ROUND_COUNTS = {"hash": 6, "xor": 4, "cheb": 1}


def cmd_wrong_login(config: RunConfig) -> dict:
    """One wasted login round with a wrong password, with op accounting."""
    start = time.perf_counter()
    if config.wrong_password == config.password:
        raise ConfigError("--wrong-password must differ from --password")
    server, rng, clock, card = _setup(config)
    experiment = wrong_login_experiment(
        card, config.wrong_password, server, clock, rng, channel_delay=config.channel_delay
    )
    as_expected = bool(experiment.server_rejected) and experiment.counts.as_dict() == _WASTED_ROUND_COUNTS
    report = _report_head("wrong-login-demo", config.echo(("wrong_password",)))
    report["experiment"] = {
        "server_rejected": experiment.server_rejected,
        "op_counts": experiment.counts.as_dict(),
        "expected_op_counts": dict(_WASTED_ROUND_COUNTS),
        "wall_time_s": experiment.wall_time_s,
    }
    report["as_expected"] = as_expected
    report["exit_status"] = EXIT_OK if as_expected else EXIT_CONTRADICTED
    report["wall_time_s"] = time.perf_counter() - start
    return report


def cmd_dos_demo(config: RunConfig) -> dict:
    """Password change with a wrong (or, as control, correct) old password."""
    start = time.perf_counter()
    server, rng, clock, card = _setup(config)
    experiment = dos_experiment(
        card,
        config.password,
        config.wrong_old_password,
        config.new_password,
        server,
        clock,
        rng,
        channel_delay=config.channel_delay,
        correct_old=config.correct_old_password,
    )
    if config.correct_old_password:
        as_expected = (
            not experiment.dos_confirmed and experiment.probes["new_password"] == "accepted"
        )
    else:
        as_expected = bool(experiment.dos_confirmed)
    report = _report_head(
        "dos-demo",
        config.echo(("wrong_old_password", "new_password", "correct_old_password")),
    )
    report["experiment"] = {
        "dos_confirmed": experiment.dos_confirmed,
        "probes": experiment.probes,
        "op_counts": experiment.counts.as_dict(),
        "wall_time_s": experiment.wall_time_s,
    }
    report["as_expected"] = as_expected
    report["exit_status"] = EXIT_OK if as_expected else EXIT_CONTRADICTED
    report["wall_time_s"] = time.perf_counter() - start
    return report


_COMMANDS = {
    "honest-run": cmd_honest_run,
    "guess-attack": cmd_guess_attack,
    "wrong-login-demo": cmd_wrong_login,
    "dos-demo": cmd_dos_demo,
}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; 2 means "claim contradicted" here,
    # so remap usage problems to the configuration-error code.
    def error(self, message):
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chebauth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for command in _COMMANDS:
        p = sub.add_parser(command)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--width", type=int, default=DEFAULT_WIDTH, help="bit width l")
        p.add_argument("--prime", default=str(DEFAULT_PRIME), help="field modulus, decimal")
        p.add_argument("--delta-t", type=int, default=DEFAULT_DELTA_T, help="freshness window, ticks")
        p.add_argument("--channel-delay", type=int, default=1, help="per-leg delivery delay, ticks")
        p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
        p.add_argument("--fixture", default=None, help="JSON file with identity/password fields")
        p.add_argument("--id", dest="identity", default=None)
        p.add_argument("--password", default=None)
        if command == "guess-attack":
            p.add_argument("--dict", dest="dictionary", default=None, help="password list, one per line")
            p.add_argument("--expect-miss", action="store_true",
                           help="expect exhaustion (true password absent from the list)")
        if command == "wrong-login-demo":
            p.add_argument("--wrong-password", default=None)
        if command == "dos-demo":
            p.add_argument("--wrong-old-password", default=None)
            p.add_argument("--new-password", default=None)
            p.add_argument("--correct-old-password", action="store_true",
                           help="control run: change with the correct old password")
    return parser


_FIXTURE_KEYS = ("identity", "password", "wrong_password", "wrong_old_password", "new_password")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "fixture", None):
        try:
            with open(args.fixture, encoding="utf-8") as handle:
                loaded = json.load(handle)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read fixture file: {exc}") from exc
        unknown = set(loaded) - set(_FIXTURE_KEYS)
        if unknown:
            raise ConfigError(f"unknown fixture keys: {sorted(unknown)}")
        values.update(loaded)
    for key in _FIXTURE_KEYS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            values[key] = flag_value
    values.setdefault("identity", _DEFAULT_IDENTITY)
    values.setdefault("password", _DEFAULT_PASSWORD)
    try:
        prime = int(args.prime)
    except ValueError as exc:
        raise ConfigError(f"--prime must be a decimal integer: {args.prime!r}") from exc
    return RunConfig(
        seed=args.seed,
        width=args.width,
        prime=prime,
        delta_t=args.delta_t,
        channel_delay=args.channel_delay,
        dictionary=getattr(args, "dictionary", None),
        identity=values["identity"],
        password=values["password"],
        wrong_password=values.get("wrong_password"),
        wrong_old_password=values.get("wrong_old_password"),
        new_password=values.get("new_password"),
        correct_old_password=getattr(args, "correct_old_password", False),
        expect_miss=getattr(args, "expect_miss", False),
        out=args.out,
    )


def _emit(report: dict, out: str | None):
    text = json.dumps(report, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        report = _COMMANDS[args.command](config)
    except (ConfigError, ExperimentInvalid, ValueError) as exc:
        print(f"chebauth: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"chebauth: i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        _emit(report, config.out)
    except OSError as exc:
        print(f"chebauth: cannot write report: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return report["exit_status"]


if __name__ == "__main__":
    sys.exit(main())
