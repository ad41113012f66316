"""Benchmark the latency of single solver steps."""
import argparse
import time

import numpy as np
import torch
from tqdm import tqdm

from nlskp.common.config import InitialDataConfig, SplittingMethod
from nlskp.common.utils import set_num_threads
from nlskp.engine.initial_data import build_initial_data
from nlskp.modeling.grid import PeriodicGrid
from nlskp.modeling.madelung import grenier_decompose
from nlskp.modeling.nonlinearity import NonlinearityModel
from nlskp.solvers.grenier import GrenierSolver
from nlskp.solvers.limit import LimitSolver
from nlskp.solvers.nls import NlsSolver


def main(args: argparse.Namespace):
    print(args)
    set_num_threads(args.threads)

    grid = PeriodicGrid(args.lengths, args.points)
    model = NonlinearityModel.from_string(args.nonlinearity)
    data = build_initial_data(InitialDataConfig(), grid, args.eps, model)

    if args.solver == "nls":
        solver = NlsSolver(grid, model, args.eps,
                           SplittingMethod[args.splitting.upper()])
        state = data.psi0

        def step(u):
            return solver.advance(u, args.dt)
    elif args.solver == "limit":
        solver = LimitSolver(grid, model.c, model.k, data.drift)
        state = solver.prepare(data.limit_v0)

        def step(u):
            return solver.step_hat(u, args.dt)
    else:
        solver = GrenierSolver(grid, model, args.eps)
        state = solver.to_hat(grenier_decompose(data.psi0, data.polar0))

        def step(u):
            return solver.step_hat(u, args.dt)

    def run_to_completion(u: torch.Tensor):
        start_time = time.perf_counter()
        for _ in range(args.num_steps):
            u = step(u)
        end_time = time.perf_counter()
        return u, end_time - start_time

    print("Warming up...")
    state, _ = run_to_completion(state)

    # Benchmark.
    latencies = []
    for _ in tqdm(range(args.num_iters), desc="Profiling iterations"):
        state, latency = run_to_completion(state)
        latencies.append(latency / args.num_steps)
    print(f'Avg step latency: {np.mean(latencies) * 1e3:.4f} ms')


if __name__ == '__main__':
    parser = argparse.ArgumentParser(
        description='Benchmark the latency of one time step of a solver.')
    parser.add_argument('--solver',
                        type=str,
                        default='nls',
                        choices=['nls', 'limit', 'grenier'])
    parser.add_argument('--nonlinearity', type=str, default='gp')
    parser.add_argument('--lengths',
                        type=float,
                        nargs='+',
                        default=[32.0 * np.pi])
    parser.add_argument('--points', type=int, nargs='+', default=[1024])
    parser.add_argument('--eps', type=float, default=0.1)
    parser.add_argument('--dt', type=float, default=1e-4)
    parser.add_argument('--splitting',
                        type=str,
                        default='strang',
                        choices=['strang', 'yoshida4'])
    parser.add_argument('--num-steps',
                        type=int,
                        default=100,
                        help='Number of steps per iteration.')
    parser.add_argument('--num-iters',
                        type=int,
                        default=3,
                        help='Number of iterations to run.')
    parser.add_argument('--threads', type=int, default=None)
    args = parser.parse_args()
    main(args)
