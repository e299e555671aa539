"""Reference strategy behind the wire protocol (stdin/stdout or a TCP port).

    python -m stabbench.harness.example_agent            # pipe mode
    python -m stabbench.harness.example_agent --port 0   # prints the bound port
"""

from __future__ import annotations

import argparse
import json
import socketserver
import sys
from typing import IO, Any

from .agents import ReferenceAgent


def serve_stream(rfile: IO[bytes], wfile: IO[bytes]) -> None:
    agent = ReferenceAgent()
    for raw in rfile:
        msg: dict[str, Any] = json.loads(raw)
        if msg.get("type") == "end":
            break
        # one submission per instance, then stop
        out = agent.reply(msg) if msg.get("type") == "instance" else {"give_up": True}
        wfile.write((json.dumps(out) + "\n").encode())
        wfile.flush()


class _Handler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        serve_stream(self.rfile, self.wfile)


def make_server(host: str = "127.0.0.1", port: int = 0) -> socketserver.ThreadingTCPServer:
    socketserver.ThreadingTCPServer.allow_reuse_address = True
    server = socketserver.ThreadingTCPServer((host, port), _Handler)
    server.daemon_threads = True
    return server


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--port", type=int, help="listen on this TCP port instead of stdin/stdout")
    ap.add_argument("--host", default="127.0.0.1")
    args = ap.parse_args(argv)
    if args.port is None:
        serve_stream(sys.stdin.buffer, sys.stdout.buffer)
        return 0
    with make_server(args.host, args.port) as server:
        print(server.server_address[1], flush=True)
        server.serve_forever()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
