"""
Record a model backend once, replay it forever
==============================================

The reasoning roles (context prediction, rule updates, translation) can be
bound to a remote model service.  Every successful response can be taped to
a cassette keyed by a hash of the exact prompt; in cassette mode the same
calls replay from disk with no network and no credential, which is how the
remote paths stay testable.

Here a mock transport stands in for the service so the demo runs offline,
but the client code path is exactly the one used against a real endpoint.
"""

import json
import os
import tempfile
from pathlib import Path

import httpx

from prefnav.gateway.backends import BackendConfig, BackendMode, LlmClient

# The fake service answers every context-prediction call with the same
# well-formed scene payload.
CANNED = {
    "room_type": "Kitchen",
    "lighting": "Bright",
    "objects": [{"label": "glass vase", "distance_m": 1.2, "fragile": True}],
    "human_present": True,
    "scene_description": "A bright kitchen with a glass vase.",
}


def fake_service(request: httpx.Request) -> httpx.Response:
    body = json.loads(request.content)
    print(f"  [service] {body['role']} call, key={body['request_key'][:12]}...")
    return httpx.Response(200, json=CANNED)


os.environ["DEMO_API_KEY"] = "not-a-real-credential"

with tempfile.TemporaryDirectory() as tmp:
    tape = Path(tmp) / "session.cassette.json"

    # Pass 1: remote mode with record=True writes the cassette.
    config = BackendConfig(
        mode=BackendMode.REMOTE,
        endpoint="https://model.invalid/v1/complete",
        credential_env="DEMO_API_KEY",
        cassette_path=str(tape),
        record=True,
    )
    print("recording pass:")
    with LlmClient(config, transport=httpx.MockTransport(fake_service)) as client:
        # call() validates the payload against the role schema, so what
        # comes back is already a SceneContext.
        scene = client.call("context-prediction", {"scene_description": "what do you see?"})
    print(f"  predicted room: {scene.room_type}")
    print(f"  cassette entries: {len(json.loads(tape.read_text()))}")

    # Pass 2: cassette mode replays from disk.  No transport, no credential,
    # bit-identical response.
    del os.environ["DEMO_API_KEY"]
    replay_config = BackendConfig(mode=BackendMode.CASSETTE, cassette_path=str(tape))
    print("replay pass:")
    with LlmClient(replay_config) as client:
        replayed = client.call("context-prediction", {"scene_description": "what do you see?"})
    print(f"  predicted room: {replayed.room_type}")
    print(f"  matches recording: {replayed == scene}")

    # A prompt that was never recorded is a hard error, not a guess.
    with LlmClient(replay_config) as client:
        try:
            client.call("context-prediction", {"scene_description": "something else"})
        except KeyError as err:
            print(f"  unrecorded prompt rejected: {str(err)[:58]}...")
