"""Query client for the multi-server deployment.

The client plays the trusted dealer: it generates the 2n keys of a
point function, uploads exactly one key per server, then either
evaluates a single input or retrieves a database entry privately.  All
connections are established before any key byte is sent, so an
unreachable server aborts the query with no partial disclosure.
"""

from __future__ import annotations

import random
import socket
from dataclasses import dataclass

from . import protocol
from .dpf import PointFunction, keygen, serialize_key
from .errors import ParameterError
from .interpolation import InterpolationScheme
from .matching import MatchingFamily
from .params import DpfParams


class QueryError(RuntimeError):
    """A server answered with an error or the replies were inconsistent."""


@dataclass(frozen=True)
class QueryResult:
    value: int
    responses: tuple[int, ...]
    db_digest: str | None = None


def _connect_all(addresses) -> list[socket.socket]:
    socks = []
    try:
        for host, port in addresses:
            socks.append(socket.create_connection((host, port), timeout=10))
    except OSError:
        for s in socks:
            s.close()
        raise
    return socks


def _expect(msg: protocol.Message, expected_type: int) -> protocol.Message:
    if msg.type == protocol.ERROR:
        raise QueryError(f"server error {msg.error_name()}: "
                         f"{msg.payload[1:].decode(errors='replace')}")
    if msg.type != expected_type:
        raise QueryError(f"unexpected reply type {msg.type}")
    return msg


def run_query(addresses, params: DpfParams, family: MatchingFamily,
              scheme: InterpolationScheme, alpha: int, beta: int, seed: int,
              x: int | None = None, pir: bool = False) -> QueryResult:
    """Generate keys, upload them, and run one evaluation or PIR round.

    `addresses` must list exactly 2n (host, port) pairs, one per key
    index in order.  Responses are summed mod p.
    """
    if (x is None) == (not pir):
        raise ParameterError("exactly one of x= or pir=True must be given")
    n = scheme.n
    if len(addresses) != 2 * n:
        raise ParameterError(
            f"need exactly {2 * n} servers, got {len(addresses)}")
    func = PointFunction(family.size, params.p, alpha, beta)
    if x is not None and not 1 <= x <= family.size:
        raise ParameterError(f"x={x} outside the domain [1, {family.size}]")

    keys = keygen(params, family, scheme, func, random.Random(seed))
    socks = _connect_all(addresses)
    try:
        for sock, key in zip(socks, keys):
            reply = protocol.request(sock, protocol.KEY_UPLOAD,
                                     serialize_key(params, key))
            _expect(reply, protocol.KEY_UPLOAD)

        responses = []
        digests = []
        for sock in socks:
            if pir:
                reply = _expect(protocol.request(sock, protocol.PIR_REQ),
                                protocol.PIR_RESP)
                responses.append(int.from_bytes(reply.payload[:2], "big"))
                digests.append(reply.payload[2:34])
            else:
                reply = _expect(
                    protocol.request(sock, protocol.EVAL_REQ,
                                     x.to_bytes(4, "big")),
                    protocol.EVAL_RESP)
                responses.append(int.from_bytes(reply.payload, "big"))
    finally:
        for s in socks:
            s.close()

    digest_hex = None
    if pir:
        if len(set(digests)) != 1:
            raise QueryError("servers reported divergent database digests")
        digest_hex = digests[0].hex()
    value = sum(responses) % params.p
    return QueryResult(value=value, responses=tuple(responses),
                       db_digest=digest_hex)
