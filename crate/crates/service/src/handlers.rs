//! Endpoint logic as plain functions over a catalog, independent of HTTP.

use latentcloud_core::autoencoder::LatentVector;
use latentcloud_core::data::family_histogram;
use latentcloud_core::latent::{
    feature_edit, interpolate, preview_latents, slider_to_t, CONTROL_COUNT, KNOB_RANGE,
    SLIDER_RANGE,
};
use latentcloud_core::metrics::Point;

use crate::catalog::SessionCatalog;
use crate::error::ApiError;
use crate::wire::*;

pub fn info(cat: &SessionCatalog) -> InfoResponse {
    let model = cat.model();
    let manifest = cat.manifest();
    let hist = family_histogram(manifest);
    let families = manifest
        .families()
        .into_iter()
        .map(|name| FamilyCount {
            count: hist[&name],
            name,
        })
        .collect();
    let k = model.latent_size();
    InfoResponse {
        model: ModelInfo {
            config: model.config().clone(),
            epochs_trained: model.meta.epochs_trained,
        },
        dataset: DatasetInfo {
            count: manifest.len(),
            point_count: manifest.point_count,
            families,
        },
        stats: cat.stats().clone(),
        controls: ControlInfo {
            count: CONTROL_COUNT,
            slider_range: SLIDER_RANGE,
            knob_range: KNOB_RANGE,
            max_offset: k.checked_sub(CONTROL_COUNT),
        },
    }
}

pub fn items(cat: &SessionCatalog) -> ItemsResponse {
    let items = cat
        .manifest()
        .entries
        .iter()
        .zip(cat.latents())
        .map(|(e, z)| ItemSummary {
            id: e.id.clone(),
            family: e.family.clone(),
            latent: z.values().to_vec(),
        })
        .collect();
    ItemsResponse { items }
}

pub fn item(cat: &SessionCatalog, id: &str) -> Result<ItemDetail, ApiError> {
    let (i, entry) = cat
        .manifest()
        .find(id)
        .ok_or_else(|| ApiError::not_found(id))?;
    let z = &cat.latents()[i];
    Ok(ItemDetail {
        id: entry.id.clone(),
        family: entry.family.clone(),
        latent: z.values().to_vec(),
        points: decode_points(cat, z)?,
    })
}

pub fn decode(cat: &SessionCatalog, req: &DecodeRequest) -> Result<DecodeResponse, ApiError> {
    let z = parse_latent(cat, &req.latent, "latent")?;
    Ok(DecodeResponse {
        points: decode_points(cat, &z)?,
    })
}

pub fn edit(cat: &SessionCatalog, req: &EditRequest) -> Result<EditResponse, ApiError> {
    let f = resolve_base(cat, req.base_id.as_deref(), req.base_latent.as_deref())?;
    let sliders = controls("sliders", &req.sliders)?;
    let knobs = controls("knobs", &req.knobs)?;
    let t = slider_to_t(cat.stats(), &sliders, &knobs, req.offset)?;
    let x = feature_edit(&f, &t)?;
    Ok(EditResponse {
        points: decode_points(cat, &x)?,
        latent: x.into_inner(),
        transform: t.into_inner(),
    })
}

pub fn interpolate_items(
    cat: &SessionCatalog,
    req: &InterpolateRequest,
) -> Result<InterpolateResponse, ApiError> {
    let rows = req
        .ids
        .iter()
        .map(|id| {
            cat.latent_of(id)
                .cloned()
                .ok_or_else(|| ApiError::not_found(id))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let h = interpolate(&rows, &req.weights)?;
    Ok(InterpolateResponse {
        points: decode_points(cat, &h)?,
        latent: h.into_inner(),
    })
}

pub fn preview(cat: &SessionCatalog, req: &PreviewRequest) -> Result<PreviewResponse, ApiError> {
    let f = resolve_base(cat, req.base_id.as_deref(), req.base_latent.as_deref())?;
    let (minus, plus) = preview_latents(cat.stats(), &f, req.dim)?;
    Ok(PreviewResponse {
        dim: req.dim,
        minus: DecodedLatent {
            points: decode_points(cat, &minus)?,
            latent: minus.into_inner(),
        },
        plus: DecodedLatent {
            points: decode_points(cat, &plus)?,
            latent: plus.into_inner(),
        },
    })
}

fn decode_points(cat: &SessionCatalog, z: &LatentVector) -> Result<Vec<Point>, ApiError> {
    Ok(cat.model().decode(z)?.into_points())
}

fn parse_latent(
    cat: &SessionCatalog,
    values: &[Option<f64>],
    field: &str,
) -> Result<LatentVector, ApiError> {
    let k = cat.model().latent_size();
    if values.len() != k {
        return Err(ApiError::bad_request(
            "dimension",
            format!("{field} has length {}, expected length {k}", values.len()),
        ));
    }
    let mut out = Vec::with_capacity(k);
    for (i, v) in values.iter().enumerate() {
        match v {
            Some(v) if v.is_finite() => out.push(*v),
            _ => {
                return Err(ApiError::bad_request(
                    "non_finite",
                    format!("{field}[{i}] is not a finite number"),
                ))
            }
        }
    }
    Ok(LatentVector::new(out)?)
}

fn resolve_base(
    cat: &SessionCatalog,
    base_id: Option<&str>,
    base_latent: Option<&[Option<f64>]>,
) -> Result<LatentVector, ApiError> {
    match (base_id, base_latent) {
        (Some(id), None) => cat
            .latent_of(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id)),
        (None, Some(values)) => parse_latent(cat, values, "base_latent"),
        _ => Err(ApiError::bad_request(
            "bad_body",
            "give exactly one of base_id and base_latent",
        )),
    }
}

fn controls(field: &str, values: &[f64]) -> Result<[f64; CONTROL_COUNT], ApiError> {
    values.try_into().map_err(|_| {
        ApiError::bad_request(
            "dimension",
            format!(
                "{field} has {} values, expected {CONTROL_COUNT}",
                values.len()
            ),
        )
    })
}
