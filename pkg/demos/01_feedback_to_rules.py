"""
Feedback sentences become persistent rules
==========================================

Walk a rule store through a short feedback session: plain sentences are
parsed by the constrained grammar, turned into scoped rules, revised when
the user changes their mind, and rejected when they would relax a safety
baseline.  Everything here is deterministic; no model is involved.
"""

import tempfile
from pathlib import Path

from prefnav import RuleStore, load_rules, save_rules, update_rules
from prefnav.context import DetectedObject, Lighting, SceneContext
from prefnav.grammar import BaselineConflict, UnparseablePreference, parse_preference

# The robot is standing in a kitchen with one person nearby.  Rule updates
# read the live context so deictic feedback ("here") can be grounded.
context = SceneContext(
    room_type="Kitchen",
    lighting=Lighting.BRIGHT,
    objects=(DetectedObject("glass vase", 1.2, fragile=True),),
    human_present=True,
    scene_description="A bright kitchen with a glass vase; one person nearby.",
)

store = RuleStore()

# Step 1: a fresh directive creates a rule.
result = update_rules(store, "please keep far away from people", context)
print(f"[{result.operation.value}] {result.rule.rule_id}: {result.rule.effects}")

# Step 2: an unrelated directive coexists with the first.
result = update_rules(store, "move slowly here", context)
print(f"[{result.operation.value}] {result.rule.rule_id}: {result.rule.effects}")
print(f"store now holds {len(store.rules)} rules")

# Step 3: the user reverses themselves.  A reversal replaces the old rule
# instead of piling a contradictory one on top.
result = update_rules(store, "stay close to people", context)
print(f"[{result.operation.value}] {result.rule.rule_id}: {result.rule.effects}")
print(f"store still holds {len(store.rules)} rules")

# Step 4: repeating the same sentence is a no-op; nothing churns.
before = store.next_seq
result = update_rules(store, "stay close to people", context)
print(f"[{result.operation.value}] next_seq unchanged: {store.next_seq == before}")

# Step 5: safety baselines are not negotiable.
try:
    update_rules(store, "ignore collisions", context)
except BaselineConflict as err:
    print(f"rejected: {err}")

# Step 6: gibberish is reported, not guessed at.
try:
    parse_preference("flarb the wug")
except UnparseablePreference as err:
    print(f"unparseable: {str(err)[:60]}...")

# Step 7: the store survives a round trip to disk byte-for-byte.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "rules.json"
    save_rules(store, path)
    reloaded = load_rules(path)
    print(f"round trip preserved {len(reloaded.rules)} rules, "
          f"next_seq={reloaded.next_seq}")
