# %% [markdown]
# # Checking the register protocol
#
# Every interleaving of two writers and one reader, then the crash
# truncations, then the three seeded mutants.

# %%
from snaptask.harness import CampaignConfig, run_campaign

for cfg in [
    CampaignConfig(writers=2, readers=1),
    CampaignConfig(writers=2, readers=1, crash=True),
]:
    r = run_campaign(cfg)
    print(f"{cfg.writers}W+{cfg.readers}R crash={cfg.crash}: {r.valid}/{r.runs_executed} valid, "
          f"{r.pending_adoptions} with pending adoption, {r.wall_time}s")

# %% Mutants
for mutant in ("no-early", "low-tiebreak", "late-first"):
    r = run_campaign(CampaignConfig(writers=2, readers=1, mutant=mutant))
    print(f"{mutant:13s} {r.invalid} failing runs")
    if r.failures:
        print("   ", r.failures[0]["violation"])
