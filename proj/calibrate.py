# Scratch calibration sweep for likelihood widths and motion noise (not part of the build).
import sys

sys.path.insert(0, "build/python")
import auvloc


def run(model, seeds=10, fov2pi=False, motion=None, **overrides):
    cfg = auvloc.default_trial_config()
    cfg.model = model
    cfg.seed = 42
    if fov2pi:
        cfg.semantic_sensor.fov = 2 * 3.141592653589793
    if motion is not None:
        for c in cfg.trajectory:
            c.noise = auvloc.MotionNoise(*motion)
    for key, value in overrides.items():
        if key == "sigma_range":
            cfg.sigma_range = value
        else:
            setattr(cfg.semantic_params, key, value)
    batch = auvloc.run_batch(cfg, seeds, "", 0)
    finals = sorted(r.final_error_m for r in batch.runs)
    med = finals[len(finals) // 2]
    n_ok = sum(1 for e in finals if e <= 1.0)
    return batch.converged_trials, med, n_ok


def main():
    mode = sys.argv[1]
    if mode == "semantic":
        grid = [
            dict(sigma_rho=1.0, sigma_theta=0.3, gate_rho=3.0, gate_theta=0.9),
            dict(sigma_rho=1.5, sigma_theta=0.5, gate_rho=4.5, gate_theta=1.5),
            dict(sigma_rho=2.0, sigma_theta=0.5, gate_rho=6.0, gate_theta=1.5),
            dict(sigma_rho=2.0, sigma_theta=0.8, gate_rho=6.0, gate_theta=2.4),
        ]
        for params in grid:
            for motion in [(0.1, 0.02, 0.02), (0.25, 0.05, 0.05)]:
                conv, med, n_ok = run(auvloc.ModelKind.SEMANTIC, fov2pi=True, motion=motion, **params)
                print("semantic fov=2pi", params, "motion", motion,
                      "-> conv %d/10, median %.2f m, err<=1m: %d/10" % (conv, med, n_ok))
    elif mode == "geometric":
        for sigma in [4.0, 6.0, 8.0, 10.0]:
            for motion in [(0.1, 0.02, 0.02), (0.25, 0.05, 0.05)]:
                conv, med, n_ok = run(auvloc.ModelKind.GEOMETRIC, motion=motion, sigma_range=sigma)
                print("geometric sigma_range=%.1f motion %s -> conv %d/10, median %.2f m, err<=1m: %d/10"
                      % (sigma, motion, conv, med, n_ok))


if __name__ == "__main__":
    main()
