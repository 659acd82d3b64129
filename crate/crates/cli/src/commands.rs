use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use latentcloud_core::autoencoder::{
    evaluate, load_model, save_model, train_with, AEConfig, AEModel, EpochReport, EvalReport,
    Labeled, SplitInfo, TrainConfig,
};
use latentcloud_core::data::{
    build_dataset, load_cloud, load_latent, normalize, save_cloud, save_latent, CloudFormat,
    DatasetManifest, DatasetSpec,
};
use latentcloud_core::latent::interpolate;
use latentcloud_core::nn::AdamConfig;
use latentcloud_service::{bind, load_catalog, router, AppState, HeaderValue, RouterOptions};

use crate::args::*;
use crate::error::{CliError, CliResult};

pub fn gen_data(a: GenDataArgs) -> CliResult {
    let spec = DatasetSpec {
        families: DatasetSpec::parse_mix(&a.families)?,
        count: a.count as usize,
        points: a.points as usize,
        seed: a.seed,
    };
    let manifest = build_dataset(&spec, &a.out)?;
    println!(
        "wrote {} clouds of {} points to {}",
        manifest.len(),
        manifest.point_count,
        a.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct LossRow {
    epoch: usize,
    train_chamfer: f64,
    val_chamfer: Option<f64>,
    val_emd_approx: Option<f64>,
}

impl From<&EpochReport> for LossRow {
    fn from(r: &EpochReport) -> Self {
        Self {
            epoch: r.epoch,
            train_chamfer: r.train_chamfer,
            val_chamfer: r.val_chamfer,
            val_emd_approx: r.val_emd,
        }
    }
}

pub fn default_loss_log(model_path: &Path) -> PathBuf {
    model_path.with_extension("loss.csv")
}

pub fn train(a: TrainArgs) -> CliResult {
    let split = SplitInfo {
        val_fraction: a.val_split,
        seed: a.seed,
    };
    split.validate()?;
    let optimizer = AdamConfig {
        learning_rate: a.lr,
        ..AdamConfig::default()
    };
    let cfg = TrainConfig {
        epochs: a.epochs,
        batch_size: a.batch_size as usize,
        optimizer,
        seed: a.seed,
        checkpoint_interval: Some(1),
        emd_subset: a.emd_subset,
        ..TrainConfig::default()
    };
    cfg.validate()?;

    let manifest = DatasetManifest::load(&a.dataset)?;
    let ae = AEConfig {
        input_points: manifest.point_count,
        latent_size: a.latent as usize,
        encoder_widths: a.encoder_widths,
        decoder_widths: a.decoder_widths,
        output_points: manifest.point_count,
        seed: a.seed,
    };
    let mut model = AEModel::new(ae)?;
    model.meta.split = Some(split);

    let clouds = manifest.load_all()?;
    let (train_idx, val_idx) = split.partition(clouds.len());
    let pick = |idx: &[usize]| idx.iter().map(|&i| clouds[i].clone()).collect::<Vec<_>>();
    let (train_set, val_set) = (pick(&train_idx), pick(&val_idx));

    let log_path = a.loss_log.unwrap_or_else(|| default_loss_log(&a.out_model));
    let csv_err = |source| CliError::Csv {
        path: log_path.clone(),
        source,
    };
    let mut log = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(&log_path)
        .map_err(csv_err)?;
    log.write_record(["epoch", "train_chamfer", "val_chamfer", "val_emd_approx"])
        .map_err(csv_err)?;
    log.flush().map_err(|e| CliError::io(&log_path, e))?;

    eprintln!(
        "training on {} clouds ({} held out), {} parameters",
        train_set.len(),
        val_set.len(),
        model.param_count()
    );
    let mut log_error = None;
    let outcome = train_with(model, &train_set, &val_set, &cfg, |r, _| {
        eprintln!(
            "epoch {:>4}  train {:.6}  val {}  emd {}",
            r.epoch,
            r.train_chamfer,
            fmt_opt(r.val_chamfer),
            fmt_opt(r.val_emd)
        );
        if log_error.is_none() {
            let res = log
                .serialize(LossRow::from(r))
                .map_err(csv_err)
                .and_then(|()| log.flush().map_err(|e| CliError::io(&log_path, e)));
            log_error = res.err();
        }
        Ok(())
    });
    if let Some(e) = log_error {
        return Err(e);
    }
    let outcome = outcome?;
    save_model(&outcome.model, &a.out_model)?;
    println!(
        "trained {} epochs; model written to {}, loss log to {}",
        outcome.history.len(),
        a.out_model.display(),
        log_path.display()
    );
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.6}"))
}

#[derive(Serialize)]
struct EvalOutput {
    subset: &'static str,
    model_epochs: usize,
    #[serde(flatten)]
    report: EvalReport,
}

pub fn eval(a: EvalArgs) -> CliResult {
    let model = load_model(&a.model)?;
    let manifest = DatasetManifest::load(&a.dataset)?;
    if manifest.point_count != model.config().input_points {
        return Err(CliError::usage(format!(
            "dataset clouds have {} points but the model expects {}",
            manifest.point_count,
            model.config().input_points
        )));
    }
    let clouds = manifest.load_all()?;
    let n = clouds.len();
    let (train_idx, val_idx) = match (a.subset, model.meta.split) {
        (Subset::All, _) => ((0..n).collect(), (0..n).collect()),
        (_, None) => {
            return Err(CliError::usage(
                "model records no train/validation split; use --subset all",
            ))
        }
        (Subset::Train, Some(split)) => {
            let (train, _) = split.partition(n);
            (train.clone(), train)
        }
        (Subset::HeldOut, Some(split)) => split.partition(n),
    };
    if val_idx.is_empty() {
        return Err(CliError::usage("the selected subset is empty"));
    }
    let label = |i: &usize| Labeled {
        cloud: &clouds[*i],
        family: manifest.entries[*i].family.as_str(),
    };
    let reference: Vec<Labeled> = train_idx.iter().map(label).collect();
    let items: Vec<Labeled> = val_idx.iter().map(label).collect();
    let report = evaluate(&model, &reference, &items, a.emd_epsilon)?;
    let out = EvalOutput {
        subset: match a.subset {
            Subset::HeldOut => "held-out",
            Subset::Train => "train",
            Subset::All => "all",
        },
        model_epochs: model.meta.epochs_trained,
        report,
    };
    let mut json = serde_json::to_string_pretty(&out).expect("report serializes");
    json.push('\n');
    if let Some(path) = &a.out {
        fs::write(path, &json).map_err(|e| CliError::io(path, e))?;
    }
    print!("{json}");
    Ok(())
}

pub fn encode(a: EncodeArgs) -> CliResult {
    let model = load_model(&a.model)?;
    let mut cloud = load_cloud(&a.input)?;
    if a.normalize {
        cloud = normalize(&cloud).0;
    }
    let z = model.encode(&cloud)?;
    save_latent(&z, &a.output)?;
    Ok(())
}

pub fn decode(a: DecodeArgs) -> CliResult {
    let model = load_model(&a.model)?;
    let z = load_latent(&a.input)?;
    let cloud = model.decode(&z)?;
    save_cloud(&cloud, &a.output, CloudFormat::from_path(&a.output))?;
    Ok(())
}

pub fn interp(a: InterpArgs) -> CliResult {
    let model = load_model(&a.model)?;
    let rows = a
        .latents
        .iter()
        .map(load_latent)
        .collect::<Result<Vec<_>, _>>()?;
    let h = interpolate(&rows, &a.weights)?;
    let cloud = model.decode(&h)?;
    save_cloud(&cloud, &a.output, CloudFormat::from_path(&a.output))?;
    if let Some(path) = &a.latent_out {
        save_latent(&h, path)?;
    }
    Ok(())
}

pub fn serve(a: ServeArgs) -> CliResult {
    let cors_origin = a
        .cors_origin
        .as_deref()
        .map(|o| {
            HeaderValue::from_str(o).map_err(|_| CliError::usage(format!("bad CORS origin {o:?}")))
        })
        .transpose()?;
    if let Some(dir) = &a.static_dir {
        if !dir.is_dir() {
            return Err(CliError::usage(format!(
                "{} is not a directory",
                dir.display()
            )));
        }
    }
    let catalog = load_catalog(&a.model, &a.dataset)?;
    let opts = RouterOptions {
        cors_origin,
        static_dir: a.static_dir,
    };
    let app = router(AppState::with_catalog(catalog), &opts);

    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::io("tokio runtime", e))?;
    runtime.block_on(async {
        let listener = bind(&a.bind).await?;
        let addr = listener
            .local_addr()
            .map_err(|e| CliError::io(a.bind.as_str(), e))?;
        println!("latentcloud listening on http://{addr}");
        std::io::stdout().flush().ok();
        latentcloud_service::serve(listener, app, shutdown_signal()).await?;
        eprintln!("shut down");
        Ok(())
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
