"""A small synthetic experiment end to end: generate, mask, replay, score.

The same flow is available from the command line:
  skystream run --window 500 --repo-size 3000 --kind correlated --seed 5
"""
from skystream import ExperimentConfig, run_experiment


def main():
    cfg = ExperimentConfig(kind="correlated", window=500, repo_size=3_000,
                           n_stream=2_000, theta=30, xi=0.3, m=1, seed=5)
    report, answers = run_experiment(cfg)
    print("metrics:")
    for key, value in report.to_dict().items():
        print(f"  {key} = {value}")
    last = answers[max(answers)]
    print(f"\nanswer set at the final tick ({last.t}): "
          f"{len(last.members)} members")
    print(last.format_line())


if __name__ == "__main__":
    main()
