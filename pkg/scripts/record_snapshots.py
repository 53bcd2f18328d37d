"""Record a session's snapshot stream for the console's replay tests."""

import json
from pathlib import Path

from coplan.agents import WorkspacePull
from coplan.bridge import Session
from coplan.scenario import load_scenario

OUT = Path(__file__).resolve().parent.parent / "frontend" / "test" / "fixtures"


def main():
    scn = load_scenario(Path(__file__).resolve().parent.parent / "fixtures" / "u_trap_operator.json")
    session = Session(scn)
    stream = [session.snapshot_msg()]
    eng = session.engine
    eng.status = "Running"
    while eng.status == "Running" and eng.tick < 200:
        record = eng.step()
        for agent_id in record.active:
            session._last_active[agent_id] = record.tick
        stream.append(session.snapshot_msg())
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / "snapshot_stream.json"
    path.write_text(json.dumps(stream, indent=1) + "\n")
    print(f"wrote {path}: {len(stream)} snapshots, final status {eng.status}")


if __name__ == "__main__":
    main()
