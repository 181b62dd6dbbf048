# CLI subcommands package
from api.commands import fom, shadow, static, sweep, sync, trace

COMMANDS = {
    "trace": trace,
    "sync": sync,
    "fom": fom,
    "static": static,
    "sweep": sweep,
    "shadow": shadow,
}
