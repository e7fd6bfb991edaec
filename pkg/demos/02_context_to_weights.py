"""
Rules plus scene context yield objective weights
================================================

Rules carry conditions (room, lighting, human presence, required objects),
so the same store translates to different preference vectors as the robot
moves between scenes.  The translation is resolved per objective: the most
recently updated applicable rule wins, and objectives nobody mentioned sit
at the neutral midpoint 0.5.
"""

import dataclasses

from prefnav import RuleStore, translate, update_rules
from prefnav.context import DetectedObject, Lighting, SceneContext
from prefnav.translator import preference_error

kitchen = SceneContext(
    room_type="Kitchen",
    lighting=Lighting.BRIGHT,
    objects=(DetectedObject("glass vase", 1.0, fragile=True),),
    human_present=True,
)
bedroom = SceneContext(room_type="Bedroom", lighting=Lighting.LOW, human_present=False)

store = RuleStore()

# "here" is grounded from the live context, so this rule only fires in
# kitchens.  The second rule is unconditional.
update_rules(store, "move slowly here", kitchen)
update_rules(store, "keep far away from people", kitchen)

for name, scene in (("kitchen", kitchen), ("bedroom", bedroom)):
    t = translate(store, scene)
    print(f"{name:8s} lambda={t.vector.as_tuple()}  rules={t.applied_rules}")
    print(f"         {t.explanation}")

# The translation error metric compares a predicted vector against a
# reference one, averaged per objective.  Identical vectors score zero.
reference = translate(store, kitchen).vector
report = preference_error([reference], [reference])
print(f"\nself-comparison error: {report.mean:.3f}")

# A prediction that misses the velocity directive by a full level pays for
# exactly that component.
wrong = dataclasses.replace(reference, velocity=0.5)
report = preference_error([wrong], [reference])
print(f"one-level velocity miss: mean={report.mean:.4f} "
      f"per_component={report.per_component}")
