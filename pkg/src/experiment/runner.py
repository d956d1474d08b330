"""Experiment runner: simulate, fit, predict, validate and screen over every (subset, model, input)"""

import asyncio
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Awaitable, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from tqdm.asyncio import tqdm

from src.config.loader import DataSettings, ExperimentConfig, InputSettings
from src.dataset.loader import Dataset, DatasetLoader, FunctionalSample
from src.dataset.partition import SubsetIndex, partition_indices
from src.dataset.synthetic import simulate
from src.errors import DataError, exit_code_for
from src.evaluation.evaluator import Evaluator, posterior_predictive
from src.fpca.model import FpcaModel
from src.gp.core import FittedGP
from src.inference.diagnostics import weight_summary
from src.inference.pipeline import fit_model
from src.inference.samples import PosteriorSample
from src.models.base import BaseKernelModel, KernelSpec
from src.models.factory import MODEL_NAMES, ModelFactory
from src.reports.generator import TABLE_PARAMETERS, ReportGenerator, SubsetResult
from src.screening.pfdi import IndexPartition, PfdiResult, average_results, overlay_frame, pfdi

logger = logging.getLogger(__name__)

STAGES = ("simulate", "fit", "predict", "validate", "screen")

# Stream tags after the data streams (partition = 0, simulation = 1)
FIT_STREAM = 2
VALIDATION_STREAM = 3
PREDICTION_STREAM = 4
SCREENING_STREAM = 5

OUTPUTS_FILE = "y.csv"


@dataclass(frozen=True)
class Combination:
    """One (subset h, model p, input q) task"""
    h: int
    model: str
    variable: str
    q: int

    @property
    def key(self) -> str:
        return f"h{self.h}/{self.variable}/{self.model}"

    @property
    def p(self) -> int:
        return ModelFactory.model_index(self.model)


@dataclass
class LoadedFit:
    model: BaseKernelModel
    sample: PosteriorSample
    train: Dataset
    test: Dataset

    def builder(self, params) -> FittedGP:
        return FittedGP.fit(KernelSpec(self.model, params), self.train)


class ExperimentRunner:
    """Runs the pipeline stages of one experiment configuration"""

    def __init__(self, config: ExperimentConfig, show_progress: bool = True):
        self.config = config
        self.output_dir = Path(config.output_dir)
        self.header_lines = config.header_lines()
        self.show_progress = show_progress
        self.results: Dict[str, Dict[str, Any]] = {}
        self._sample: Optional[FunctionalSample] = None

    # ------------------------------------------------------------------ paths

    @property
    def data_dir(self) -> Path:
        return self.output_dir / "data"

    def fit_dir(self, combo: Combination) -> Path:
        return self.output_dir / "fits" / f"h{combo.h}" / combo.variable / combo.model

    # ------------------------------------------------------------------- data

    def _data_settings(self) -> DataSettings:
        if self.config.data.source == "files":
            return self.config.data
        variable = self.config.simulation.variable
        return DataSettings(
            source="files",
            inputs={variable: InputSettings(str(self.data_dir / f"{variable}.csv"), normalized=True)},
            outputs=str(self.data_dir / OUTPUTS_FILE),
        )

    def load_sample(self) -> FunctionalSample:
        if self._sample is None:
            settings = self._data_settings()
            if self.config.data.source == "simulation" and not Path(settings.outputs).exists():
                raise DataError(f"No simulated data in {self.data_dir}; run the simulate command first")
            self._sample = DatasetLoader.load_sample(settings, self.config.scaling_bounds)
        return self._sample

    def subsets(self) -> List[SubsetIndex]:
        partition = self.config.partition
        return partition_indices(self.load_sample().n, partition.H, partition.n_per, self.config.seed)

    def combinations(self) -> List[Combination]:
        """Every task in canonical order: subset, then input, then model"""
        names = self.load_sample().names
        models = [m for m in MODEL_NAMES if m in self.config.models]
        return [
            Combination(h, model, variable, q)
            for h in range(1, self.config.partition.H + 1)
            for q, variable in enumerate(names)
            for model in models
        ]

    def split(self, combo: Combination, subsets: List[SubsetIndex]) -> Tuple[Dataset, Dataset]:
        index = subsets[combo.h - 1]
        sample = self.load_sample()
        return sample.subset(index.train).dataset(combo.variable), sample.subset(index.test).dataset(combo.variable)

    def stream_entropy(self, stream: int, combo: Combination) -> List[int]:
        return [self.config.seed, stream, combo.h, combo.p, combo.q]

    def _rng(self, stream: int, combo: Combination) -> np.random.Generator:
        return np.random.default_rng(self.stream_entropy(stream, combo))

    # ---------------------------------------------------------------- writing

    def _write_json(self, path: Path, payload: Dict[str, Any]) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {"config_hash": self.config.config_hash(), "seed": self.config.seed, **payload}
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, ensure_ascii=False)
        return path

    def _write_csv(self, path: Path, frame: pd.DataFrame, float_format: str = "%.17g") -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            for line in self.header_lines:
                f.write(f"# {line}\n")
            frame.to_csv(f, index=False, float_format=float_format)
        return path

    # -------------------------------------------------------------- scheduler

    async def _run_tasks(self, stage: str, combos: List[Combination],
                         worker: Callable[[Combination], Awaitable[Dict[str, Any]]]) -> Dict[str, Dict[str, Any]]:
        """Run one worker per combination, at most `jobs` at a time; failures are recorded, not raised"""
        semaphore = asyncio.Semaphore(self.config.jobs)
        progress_bar = tqdm(total=len(combos), desc=stage.capitalize()) if self.show_progress else None

        async def guarded(combo: Combination) -> Dict[str, Any]:
            async with semaphore:
                record = {"h": combo.h, "model": combo.model, "variable": combo.variable}
                try:
                    record.update(await worker(combo))
                    record.setdefault("status", "completed")
                except Exception as e:
                    logger.error(f"{stage} {combo.key} failed: {e}")
                    logger.debug("Traceback", exc_info=True)
                    record.update({"status": "failed", "error": str(e), "exit_code": exit_code_for(e)})
                if progress_bar:
                    progress_bar.update(1)
                return record

        records = await asyncio.gather(*[guarded(c) for c in combos])
        if progress_bar:
            progress_bar.close()
        results = {combo.key: record for combo, record in zip(combos, records)}
        self.results[stage] = results
        self.save_metadata(stage)
        return results

    def save_metadata(self, stage: str) -> Path:
        results = self.results.get(stage, {})
        counts: Dict[str, int] = {}
        for record in results.values():
            counts[record["status"]] = counts.get(record["status"], 0) + 1
        path = self._write_json(self.output_dir / f"run_{stage}.json", {
            "stage": stage,
            "models": self.config.models,
            "counts": counts,
            "results": results,
        })
        logger.info(f"Saved run metadata to {path}")
        return path

    def exit_code(self) -> int:
        codes = [r.get("exit_code", 0) for stage in self.results.values() for r in stage.values()]
        return max(codes, default=0)

    # ----------------------------------------------------------------- stages

    def simulate(self) -> Path:
        """Write the simulated profiles, outputs and the generating parameters"""
        spec = self.config.simulation
        dataset = simulate(spec, self.config.seed)
        DatasetLoader.save_profiles(self.data_dir / f"{spec.variable}.csv", dataset.grid, dataset.inputs,
                                    self.header_lines)
        DatasetLoader.save_outputs(self.data_dir / OUTPUTS_FILE, dataset.outputs, self.header_lines)
        self._write_json(self.data_dir / "truth.json", {"simulation": spec.to_dict()})
        self._sample = None
        self.results["simulate"] = {"data": {"status": "completed", "n": dataset.n, "K": dataset.grid.K}}
        self.save_metadata("simulate")
        logger.info(f"Simulated data written to {self.data_dir}")
        return self.data_dir

    async def fit(self) -> Dict[str, Dict[str, Any]]:
        subsets = self.subsets()
        priors = self.config.prior_set()
        inner_progress = self.show_progress and self.config.jobs == 1

        def fit_one(combo: Combination) -> Dict[str, Any]:
            train, _ = self.split(combo, subsets)
            model = ModelFactory.create_from_config(combo.model, self.config.fpca)
            result = fit_model(model, train, priors, self.config.mcmc, self._rng(FIT_STREAM, combo),
                               show_progress=inner_progress)
            self._save_fit(combo, result)
            if not result.diagnostics.passed:
                logger.warning(f"{combo.key}: {'; '.join(result.diagnostics.failures())}")
            return {
                "diagnostics_passed": result.diagnostics.passed,
                "divergences": result.sample.divergences,
                "map_log_posterior": result.map_estimate.log_posterior,
            }

        async def worker(combo: Combination) -> Dict[str, Any]:
            return await asyncio.to_thread(fit_one, combo)

        return await self._run_tasks("fit", self.combinations(), worker)

    def _save_fit(self, combo: Combination, result) -> None:
        directory = self.fit_dir(combo)
        model, posterior = result.model, result.sample
        derived = model.derived_columns(posterior.draws[:, :model.n_kernel])
        posterior.save_csv(directory / "posterior.csv", self.header_lines, derived)
        self._write_json(directory / "diagnostics.json", result.diagnostics.to_dict())
        self._write_json(directory / "map.json", {
            "model": model.describe(),
            "map": result.map_estimate.params.as_dict(),
            "log_posterior": result.map_estimate.log_posterior,
            "n_candidates": result.n_candidates,
            "optimizations": [r.to_dict() for r in result.optimizations],
        })
        fpca = getattr(model, "fpca", None)
        if fpca is not None:
            self._write_json(directory / "fpca.json", {"fpca": fpca.to_dict()})
        summary = weight_summary(posterior, model)
        frame = pd.DataFrame(summary)
        if model.family == "fiGP":
            frame.insert(0, "t", model.grid.t)
        self._write_csv(directory / "weights.csv", frame)
        logger.info(f"{combo.key}: fit saved to {directory}")

    def load_fit(self, combo: Combination, subsets: List[SubsetIndex]) -> LoadedFit:
        """Rebuild the model on its training subset and read its posterior sample"""
        directory = self.fit_dir(combo)
        path = directory / "posterior.csv"
        if not path.exists():
            raise FileNotFoundError(f"No posterior sample for {combo.key} ({path}); run the fit command first")
        train, test = self.split(combo, subsets)
        fpca = None
        if (directory / "fpca.json").exists():
            with open(directory / "fpca.json", encoding="utf-8") as f:
                fpca = FpcaModel.from_dict(json.load(f)["fpca"])
        model = ModelFactory.create_from_config(combo.model, self.config.fpca, fpca=fpca).prepare(train)
        return LoadedFit(model, PosteriorSample.load_csv(path, model.layout), train, test)

    async def predict(self) -> Dict[str, Dict[str, Any]]:
        subsets = self.subsets()
        settings = self.config.validation

        def predict_one(combo: Combination) -> Dict[str, Any]:
            loaded = self.load_fit(combo, subsets)
            mean, sd = posterior_predictive(loaded.builder, loaded.sample, loaded.test, settings.n_thin,
                                            settings.thinning, settings.batch_size,
                                            self._rng(PREDICTION_STREAM, combo))
            frame = pd.DataFrame({
                "row": subsets[combo.h - 1].test,
                "y": loaded.test.outputs,
                "mean": mean,
                "sd": sd,
            })
            path = self.output_dir / "predictions" / f"h{combo.h}" / combo.variable / f"{combo.model}.csv"
            self._write_csv(path, frame)
            return {"path": str(path)}

        async def worker(combo: Combination) -> Dict[str, Any]:
            return await asyncio.to_thread(predict_one, combo)

        return await self._run_tasks("predict", self.combinations(), worker)

    async def validate(self) -> ReportGenerator:
        """Posterior-averaged statistics per combination, then the aggregated report"""
        subsets = self.subsets()
        settings = self.config.validation
        generator = ReportGenerator(str(self.output_dir / "validation"), self.header_lines,
                                    model_order=list(MODEL_NAMES))
        subset_results: Dict[str, SubsetResult] = {}

        async def worker(combo: Combination) -> Dict[str, Any]:
            try:
                loaded = await asyncio.to_thread(self.load_fit, combo, subsets)
            except FileNotFoundError as e:
                logger.warning(str(e))
                subset_results[combo.key] = SubsetResult(combo.h, combo.model, combo.variable,
                                                         status="missing", error=str(e))
                return {"status": "missing", "error": str(e)}
            evaluator = Evaluator(loaded.builder, loaded.test)
            try:
                stats = await evaluator.evaluate(loaded.sample, settings.n_thin, settings.thinning,
                                                 settings.batch_size, self._rng(VALIDATION_STREAM, combo),
                                                 show_progress=False, label=combo.key)
            except Exception as e:
                subset_results[combo.key] = SubsetResult(combo.h, combo.model, combo.variable,
                                                         status="failed", error=str(e))
                raise
            subset_results[combo.key] = SubsetResult(combo.h, combo.model, combo.variable, stats,
                                                     self._posterior_means(loaded))
            return stats.to_dict()

        combos = self.combinations()
        await self._run_tasks("validate", combos, worker)
        generator.add_results([subset_results[c.key] for c in combos if c.key in subset_results])
        generator.save_csv()
        generator.save_detailed_report({"config_hash": self.config.config_hash(), "seed": self.config.seed})
        return generator

    @staticmethod
    def _posterior_means(loaded: LoadedFit) -> Dict[str, float]:
        model, sample = loaded.model, loaded.sample
        frame = sample.to_frame(model.derived_columns(sample.draws[:, :model.n_kernel]))
        return {name: float(frame[name].mean()) for name in TABLE_PARAMETERS if name in frame.columns}

    def screening_partition(self) -> IndexPartition:
        screening = self.config.screening
        if screening.edges is not None:
            return IndexPartition(np.asarray(screening.edges, dtype=float))
        return IndexPartition.equidistant(screening.partition_size)

    async def screen(self) -> Dict[str, Dict[str, Any]]:
        """PFDI of the screening model per subset, averaged over subsets, with the weight overlay"""
        subsets = self.subsets()
        screening = self.config.screening
        partition = self.screening_partition()
        names = self.load_sample().names
        combos = [Combination(h, screening.model, variable, q)
                  for q, variable in enumerate(names) for h in range(1, self.config.partition.H + 1)]
        per_subset: Dict[str, PfdiResult] = {}

        def screen_one(combo: Combination) -> Dict[str, Any]:
            try:
                loaded = self.load_fit(combo, subsets)
            except FileNotFoundError as e:
                raise DataError(f"Screening needs the {screening.model} fit for {combo.key}: {e}") from e
            fit = loaded.builder(loaded.sample.mean_params())
            result = pfdi(fit, loaded.test, partition, screening.n_perms,
                          seed=self.stream_entropy(SCREENING_STREAM, combo))
            per_subset[combo.key] = result
            path = self.output_dir / "screening" / combo.variable / f"pfdi_h{combo.h}.csv"
            self._write_csv(path, result.to_frame())
            return {"path": str(path), "reference_rmse": result.reference.rmse}

        async def worker(combo: Combination) -> Dict[str, Any]:
            return await asyncio.to_thread(screen_one, combo)

        results = await self._run_tasks("screen", combos, worker)

        for variable in names:
            collected = [per_subset[c.key] for c in combos if c.variable == variable and c.key in per_subset]
            if not collected:
                logger.warning(f"No PFDI results for input '{variable}'")
                continue
            averaged = average_results(collected)
            directory = self.output_dir / "screening" / variable
            self._write_csv(directory / "pfdi.csv", averaged.to_frame())
            grid = self.load_sample().dataset(variable).grid
            overlay = overlay_frame(grid, self._weight_mean(variable, grid.K), averaged)
            self._write_csv(directory / "overlay.csv", overlay)
            logger.info(f"Screening results for '{variable}' written to {directory}")
        return results

    def _weight_mean(self, variable: str, k: int) -> Optional[np.ndarray]:
        """Posterior mean weight function of the overlay model, averaged over available subsets"""
        model = self.config.screening.weight_model
        frames = []
        for h in range(1, self.config.partition.H + 1):
            path = self.output_dir / "fits" / f"h{h}" / variable / model / "weights.csv"
            if path.exists():
                weights = pd.read_csv(path, comment="#")["mean"].to_numpy(dtype=float)
                if weights.size != k:
                    logger.warning(f"{path}: {weights.size} weights for a grid of {k} points; skipped")
                    continue
                frames.append(weights)
        if not frames:
            logger.warning(f"No {model} weight summaries for '{variable}'; overlay has no weight column values")
            return None
        return np.mean(frames, axis=0)

    # ---------------------------------------------------------------- summary

    def print_summary(self, stage: str):
        """Print a per-combination status table for one stage"""
        results = self.results.get(stage, {})
        print("\n" + "=" * 60)
        print(f"{stage.upper()} COMPLETE")
        print("=" * 60)
        if results:
            frame = pd.DataFrame(results.values())
            columns = [c for c in ("h", "variable", "model", "status", "divergences", "diagnostics_passed", "error")
                       if c in frame.columns]
            print(frame[columns].to_string(index=False))
        print("=" * 60)
