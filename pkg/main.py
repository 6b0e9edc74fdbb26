#!/usr/bin/env python3
"""
ORAN双切片智能流量引导仿真主程序
子命令: train / evaluate / sweep / oracle / replay；不带参数启动时进入交互菜单
"""

import argparse
import logging
import sys
from datetime import datetime
from pathlib import Path

# 添加项目路径
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root / 'src'))

from config import DEFAULT_CONFIG, load_config, load_output_settings, list_scenarios, scenario_path
from core.errors import TrafficSteeringError
from core.system_config import SystemConfig
from algorithms.baseline import (
    SchemeId, DEFAULT_SCHEMES, BenchmarkManager, BruteForceScheme, RelaxedUpperBoundScheme,
    brute_force_optimum, relaxed_frame_bound, fixed_numerology_config)
from simulation import (
    FrameContext, EVALUATION_EPISODE_OFFSET, MetricsSeries, ddqn_policy, evaluate, generate_trace,
    outcome_records, run_episode, train)
from output import RunManifest, ResultExporter, dump_trace, load_checkpoint, load_trace, save_checkpoint

logger = logging.getLogger(__name__)

LEARNED_SCHEMES = (SchemeId.PROPOSED, SchemeId.UNIFORM_PHI, SchemeId.FIXED_NUMEROLOGY)


def setup_logging(level: str = 'INFO'):
    logging.basicConfig(level=getattr(logging, str(level).upper(), logging.INFO),
                        format='%(asctime)s - %(levelname)s - %(message)s')


def scheme_setup(scheme: SchemeId, config: SystemConfig):
    """学习类方案的 (配置, 分流方式)"""
    if scheme not in LEARNED_SCHEMES:
        raise TrafficSteeringError(f"scheme '{scheme.value}' has no trained agents; use sweep or oracle")
    if scheme == SchemeId.FIXED_NUMEROLOGY:
        return fixed_numerology_config(config), 'heuristic'
    return config, 'uniform' if scheme == SchemeId.UNIFORM_PHI else 'heuristic'


def _seeds(args, config: SystemConfig):
    return list(args.seed) if args.seed else list(config.seeds)


def _timestamp() -> str:
    return datetime.now().strftime("%Y%m%d_%H%M%S")


def cmd_train(args) -> int:
    """训练一个学习类方案，保存检查点与学习曲线"""
    config = load_config(args.config)
    scheme = SchemeId.parse(args.scheme)
    scheme_config, flow_split = scheme_setup(scheme, config)
    seed = _seeds(args, config)[0]
    exporter = ResultExporter(args.out)
    manifest = RunManifest.start(scheme_config, [seed], scheme.value, str(args.config))
    timestamp = _timestamp()

    print(f"🚀 训练 {scheme.value} (种子 {seed})")
    result = train(scheme_config, seed, epochs=args.epochs, flow_split=flow_split, progress_every=10)
    curve_path = exporter.export_learning_curve(result.learning_curve, scheme.value, seed, timestamp)
    checkpoint = Path(args.checkpoint) if args.checkpoint else Path(args.out) / f"{scheme.value}_seed{seed}.ckpt"
    save_checkpoint(result.agents, checkpoint)

    manifest.finish(learning_curve=curve_path, checkpoint=str(checkpoint))
    manifest_path = exporter.write_manifest(manifest, f"{scheme.value}_train", timestamp)
    print(f"✅ 训练完成 ({result.elapsed:.1f}s)")
    print(f"   学习曲线: {curve_path}")
    print(f"   检查点: {checkpoint}")
    print(f"   运行清单: {manifest_path}")
    return 0


def cmd_evaluate(args) -> int:
    """贪婪评估；给定检查点时直接加载，否则先训练"""
    config = load_config(args.config)
    scheme = SchemeId.parse(args.scheme)
    scheme_config, flow_split = scheme_setup(scheme, config)
    seeds = _seeds(args, config)
    exporter = ResultExporter(args.out)
    manifest = RunManifest.start(scheme_config, seeds, scheme.value, str(args.config))
    timestamp = _timestamp()

    if args.checkpoint:
        agents = load_checkpoint(args.checkpoint, scheme_config)
        print(f"📂 已加载检查点: {args.checkpoint}")
    else:
        print(f"🚀 未指定检查点，先训练 {scheme.value} (种子 {seeds[0]})")
        agents = train(scheme_config, seeds[0], epochs=args.epochs, flow_split=flow_split).agents

    if args.dump_traces:
        ctx = FrameContext.build(scheme_config)
        for seed in seeds:
            trace = generate_trace(ctx, seed, EVALUATION_EPISODE_OFFSET, scheme_config.eval_frames)
            dump_trace(trace, Path(args.dump_traces) / f"seed_{seed}")
        print(f"💾 轨迹已导出到: {args.dump_traces}")

    series = evaluate(agents, scheme_config, seeds, scheme=scheme.value, flow_split=flow_split)
    metrics_path = exporter.export_metrics(series, scheme.value, timestamp)
    aggregate_path = exporter.export_aggregate(series, scheme.value, timestamp)
    manifest.finish(metrics=metrics_path, aggregate=aggregate_path)
    exporter.write_manifest(manifest, scheme.value, timestamp)
    _print_aggregate(series)
    return 0


def cmd_sweep(args) -> int:
    """功率扫描：所有方案在配对种子、各功率点上的对比"""
    config = load_config(args.config)
    schemes = [SchemeId.parse(s) for s in args.scheme] if args.scheme else list(DEFAULT_SCHEMES)
    seeds = _seeds(args, config)
    power_points = list(args.power) if args.power else list(config.power_sweep_dbm)
    exporter = ResultExporter(args.out)
    manifest = RunManifest.start(config, seeds, ','.join(s.value for s in schemes), str(args.config))
    timestamp = _timestamp()

    manager = BenchmarkManager(config, {'epochs': args.epochs})
    results = manager.run_benchmark(seeds, power_points, schemes, workers=args.workers)
    print("\n" + manager.generate_comparison_table(results))

    series = results['series']
    metrics_path = exporter.export_metrics(series, 'sweep', timestamp)
    aggregate_path = exporter.export_aggregate(series, 'sweep', timestamp)
    report_path = exporter.generate_summary_report(series, config, timestamp=timestamp)
    manifest.finish(metrics=metrics_path, aggregate=aggregate_path, report=report_path)
    exporter.write_manifest(manifest, 'sweep', timestamp)
    failed = [name for name, data in results.items() if name != 'series' and 'error' in data]
    return 1 if failed else 0


def cmd_oracle(args) -> int:
    """小实例上的穷举最优与松弛界"""
    config_path = args.config if args.config != DEFAULT_CONFIG else scenario_path('tiny')
    config = load_config(config_path)
    seeds = _seeds(args, config)
    ctx = FrameContext.build(config)
    exporter = ResultExporter(args.out)
    manifest = RunManifest.start(config, seeds, 'brute_force,relaxed_upper_bound', str(config_path))
    timestamp = _timestamp()

    print("🔬 逐帧核对: 松弛界 ≤ 穷举最优（零初始队列、均匀分流）")
    breaches = 0
    for seed in seeds:
        trace = generate_trace(ctx, seed, EVALUATION_EPISODE_OFFSET, config.eval_frames)
        for inputs in trace.frames:
            best = brute_force_optimum(config, inputs, ctx=ctx)
            bound = relaxed_frame_bound(ctx, inputs)
            ok = bound.objective <= best.objective + 1e-9
            breaches += 0 if ok else 1
            print(f"   {'✅' if ok else '❌'} 种子 {seed} 帧 {inputs.frame}: 松弛界={bound.objective:.6f}, "
                  f"最优={best.objective:.6f} ({best.feasible_count}/{best.evaluated} 可行)")

    results = BruteForceScheme(config).run_scheme(seeds) + RelaxedUpperBoundScheme(config).run_scheme(seeds)
    series = MetricsSeries.concat(r.metrics for r in results if r.success)
    metrics_path = exporter.export_metrics(series, 'oracle', timestamp)
    manifest.finish(metrics=metrics_path)
    exporter.write_manifest(manifest, 'oracle', timestamp)
    _print_aggregate(series)
    return 1 if breaches else 0


def cmd_replay(args) -> int:
    """在导出的轨迹上重放评估"""
    if not args.traces or not args.checkpoint:
        raise TrafficSteeringError("replay needs --traces and --checkpoint")
    config = load_config(args.config)
    scheme = SchemeId.parse(args.scheme)
    scheme_config, flow_split = scheme_setup(scheme, config)
    ctx = FrameContext.build(scheme_config)
    agents = load_checkpoint(args.checkpoint, scheme_config)
    exporter = ResultExporter(args.out)
    timestamp = _timestamp()

    directories = sorted(p for p in Path(args.traces).iterdir() if p.is_dir()) or [Path(args.traces)]
    records, seeds = [], []
    for directory in directories:
        seed = int(directory.name.split('_')[-1]) if directory.name.startswith('seed_') else 0
        trace = load_trace(directory, scheme_config, ctx.grid)
        outcomes = run_episode(ctx, trace, ddqn_policy(ctx, agents), flow_split)
        records.extend(outcome_records(outcomes, scheme.value, seed, scheme_config.max_power_dbm,
                                       scheme_config.frame_duration))
        seeds.append(seed)
        print(f"   ▶️  重放 {directory} ({len(trace)} 帧)")

    series = MetricsSeries.from_records(records)
    manifest = RunManifest.start(scheme_config, seeds, scheme.value, str(args.config))
    metrics_path = exporter.export_metrics(series, f"{scheme.value}_replay", timestamp)
    manifest.finish(metrics=metrics_path, traces=str(args.traces))
    exporter.write_manifest(manifest, f"{scheme.value}_replay", timestamp)
    _print_aggregate(series)
    return 0


def _print_aggregate(series: MetricsSeries):
    print("\n📊 结果汇总:")
    for row in series.aggregate().itertuples(index=False):
        print(f"   {row.scheme} @ {row.p_max_dbm:.1f} dBm: eMBB吞吐={row.embb_throughput_bps_mean / 1e6:.4f} Mbps, "
              f"uRLLC时延={row.worst_urllc_latency_s_mean * 1e3:.4f} ms, 平均队列={row.avg_queue_bits_mean:.1f} bits, "
              f"可行率={row.feasible_mean:.1%}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="ORAN双切片智能流量引导仿真")
    sub = parser.add_subparsers(dest='command')

    def common(p, scheme_multi: bool = False):
        p.add_argument('--config', default=DEFAULT_CONFIG, help='YAML配置文件')
        p.add_argument('--seed', type=int, nargs='+', help='随机种子（缺省取配置中的种子列表）')
        if scheme_multi:
            p.add_argument('--scheme', nargs='+', help='方案列表')
        else:
            p.add_argument('--scheme', default=SchemeId.PROPOSED.value, help='方案名')
        p.add_argument('--epochs', type=int, help='训练回合数（覆盖配置）')
        p.add_argument('--out', default='results', help='输出目录')
        p.add_argument('--checkpoint', help='检查点路径')
        p.add_argument('--dump-traces', dest='dump_traces', help='导出评估轨迹的目录')

    common(sub.add_parser('train', help='训练DDQN智能体'))
    common(sub.add_parser('evaluate', help='贪婪评估'))
    sweep = sub.add_parser('sweep', help='功率预算扫描')
    common(sweep, scheme_multi=True)
    sweep.add_argument('--power', type=float, nargs='+', help='功率点 (dBm)')
    sweep.add_argument('--workers', type=int, default=1, help='并行进程数')
    common(sub.add_parser('oracle', help='小实例穷举最优'))
    replay = sub.add_parser('replay', help='在导出的轨迹上重放')
    common(replay)
    replay.add_argument('--traces', help='轨迹目录')
    return parser


COMMANDS = {
    'train': cmd_train,
    'evaluate': cmd_evaluate,
    'sweep': cmd_sweep,
    'oracle': cmd_oracle,
    'replay': cmd_replay,
}


def run_command(argv) -> int:
    args = build_parser().parse_args(argv)
    try:
        setup_logging(load_output_settings(args.config)['log_level'])
        return COMMANDS[args.command](args)
    except TrafficSteeringError as e:
        print(f"❌ {e}")
        return 1


def show_menu():
    """显示主菜单"""
    print("\n" + "=" * 50)
    print("🎯 ORAN智能流量引导仿真系统")
    print("=" * 50)
    print("1. 🚀 训练并评估所提方案")
    print("2. 📊 方案对比 (所提 vs 均匀分流 vs 固定参数集 vs 松弛上界)")
    print("3. 🔬 功率预算扫描")
    print("4. 🧮 小实例穷举核对")
    print("5. 🔄 切换场景配置")
    print("6. ❌ 退出")
    print("=" * 50)
    return input("请选择功能 (1-6): ").strip()


def choose_scenario(current: str) -> str:
    scenarios = list_scenarios()
    if not scenarios:
        print("❌ 没有找到可用场景")
        return current
    print("可用场景:")
    for i, scenario in enumerate(scenarios, 1):
        print(f"  {i}. {scenario}")
    choice = input("\n请选择场景 (输入编号): ").strip()
    try:
        index = int(choice) - 1
        if 0 <= index < len(scenarios):
            path = str(scenario_path(scenarios[index]))
            config = load_config(path)
            print(f"\n✅ 已切换到场景: {scenarios[index]}")
            print(f"   RU数: {config.num_rus}, eMBB/uRLLC用户: {config.embb_users}/{config.urllc_users}")
            print(f"   带宽: {config.bandwidth / 1e6:.2f} MHz, 帧长: {config.frame_duration * 1e3:.1f} ms")
            print(f"   训练回合: {config.epochs}, 评估帧数: {config.eval_frames}")
            return path
        print("❌ 无效选择")
    except ValueError:
        print("❌ 请输入有效数字")
    return current


def interactive():
    """交互菜单"""
    print("🎯 ORAN智能流量引导仿真系统")
    print("   核心功能: DDQN训练评估、方案对比、功率扫描、穷举核对、场景切换")
    config_path = str(DEFAULT_CONFIG)

    while True:
        try:
            choice = show_menu()
            if choice == '1':
                run_command(['evaluate', '--config', config_path])
            elif choice == '2':
                run_command(['sweep', '--config', config_path, '--power', str(load_config(config_path).max_power_dbm)])
            elif choice == '3':
                run_command(['sweep', '--config', config_path])
            elif choice == '4':
                run_command(['oracle'])
            elif choice == '5':
                config_path = choose_scenario(config_path)
            elif choice == '6':
                print("\n👋 退出程序")
                break
            else:
                print("❌ 无效选择，请重新输入")

            input("\n按回车键继续...")

        except KeyboardInterrupt:
            print("\n\n👋 程序被用户中断")
            break
        except Exception as e:
            print(f"\n❌ 程序错误: {e}")
            input("按回车键继续...")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        interactive()
        return 0
    return run_command(argv)


if __name__ == "__main__":
    sys.exit(main())
