//! The plugin catalog: one descriptor per supported plugin.

use super::{ids, ParamKind, ParamSpec, ParamValue, PluginDescriptor, PluginKind, TsInputs};

fn spec(name: &str, kind: ParamKind, default: Option<ParamValue>) -> ParamSpec {
    ParamSpec {
        name: name.to_string(),
        kind,
        enum_values: Vec::new(),
        default,
    }
}

fn real(name: &str) -> ParamSpec {
    spec(name, ParamKind::Real, None)
}

fn positive_real(name: &str) -> ParamSpec {
    spec(name, ParamKind::PositiveReal, None)
}

fn integer(name: &str, default: Option<i64>) -> ParamSpec {
    spec(name, ParamKind::Integer, default.map(ParamValue::Integer))
}

fn positive_integer(name: &str, default: Option<i64>) -> ParamSpec {
    spec(
        name,
        ParamKind::PositiveInteger,
        default.map(ParamValue::Integer),
    )
}

fn enumeration(name: &str, values: &[&str], default: &str) -> ParamSpec {
    ParamSpec {
        name: name.to_string(),
        kind: ParamKind::Enum,
        enum_values: values.iter().map(|v| v.to_string()).collect(),
        default: Some(ParamValue::Enum(default.to_string())),
    }
}

fn real_pair(name: &str) -> ParamSpec {
    spec(name, ParamKind::RealPair, None)
}

fn real_triple(name: &str) -> ParamSpec {
    spec(name, ParamKind::RealTriple, None)
}

fn sf(id: &str, display: &str, sf_outputs: usize, segments: bool, params: Vec<ParamSpec>) -> PluginDescriptor {
    PluginDescriptor {
        id: id.to_string(),
        display_name: display.to_string(),
        kind: PluginKind::Sf,
        ts_inputs: TsInputs::Exact(1),
        ts_outputs: 0,
        sf_outputs,
        segment_capable: segments,
        params,
    }
}

fn ts(
    id: &str,
    display: &str,
    inputs: TsInputs,
    ts_outputs: usize,
    segments: bool,
    params: Vec<ParamSpec>,
) -> PluginDescriptor {
    PluginDescriptor {
        id: id.to_string(),
        display_name: display.to_string(),
        kind: PluginKind::Ts,
        ts_inputs: inputs,
        ts_outputs,
        sf_outputs: 0,
        segment_capable: segments,
        params,
    }
}

fn time_scaling() -> ParamSpec {
    enumeration("time", &["per-sample", "per-second"], "per-sample")
}

fn window_length() -> ParamSpec {
    positive_integer("window", None)
}

fn membership_params() -> Vec<ParamSpec> {
    vec![
        positive_integer("terms", Some(3)),
        enumeration(
            "design",
            &[
                "median",
                "equal",
                "cluster",
                "fix",
                "median-rounded",
                "equal-rounded",
                "cluster-rounded",
            ],
            "median",
        ),
    ]
}

fn yes_no(name: &str, default: &str) -> ParamSpec {
    enumeration(name, &["no", "yes"], default)
}

pub(super) fn build() -> Vec<PluginDescriptor> {
    let one = TsInputs::Exact(1);
    let two = TsInputs::Exact(2);
    let many = TsInputs::Unbounded;

    vec![
        // Single-feature extractors.
        sf(ids::COG, "COG SF", 1, true, vec![]),
        sf(ids::MAX, "Maximum", 1, true, vec![]),
        sf(ids::MAPO, "Maximum position", 1, true, vec![]),
        sf(ids::MEAN, "Mean value SF", 1, true, vec![]),
        sf(ids::MEAN_NAN, "Mean value SF NaN", 1, true, vec![]),
        sf(ids::MEDIAN, "Median SF", 1, true, vec![]),
        sf(ids::MEDIAN_NAN, "Median SF NaN", 1, true, vec![]),
        sf(ids::MIN, "Minimum", 1, true, vec![]),
        sf(ids::MIPO, "Minimum position", 1, true, vec![]),
        sf(ids::ND_ABS, "Norm deviation (absolute value)", 1, true, vec![]),
        sf(ids::ND_DIR, "Norm deviation (direction)", 1, true, vec![]),
        sf(ids::ROM, "Range of Motion", 1, true, vec![]),
        sf(ids::STD_SF, "STD SF", 1, true, vec![]),
        sf(ids::SUM, "Sum SF", 1, true, vec![]),
        sf(ids::TS_DISCR_SF, "TS->DISCR SF", 5, true, membership_params()),
        sf(ids::TS_FUZZY_SF, "TS->FUZZY SF", 5, true, membership_params()),
        sf(
            ids::TS_PC_SF,
            "TS->PC SF",
            2,
            true,
            vec![positive_integer("components", Some(1)), yes_no("normalize", "no")],
        ),
        sf(
            ids::TS_SF,
            "TS->SF",
            1,
            false,
            vec![positive_integer("sample_point", None)],
        ),
        sf(ids::ND_SIGN, "below/above norm mean value", 1, true, vec![]),
        // Time-series transforms.
        ts(ids::ABS, "Absolute value", one, 1, false, vec![]),
        ts(
            ids::FE_MED_AC,
            "Acausal median of a window",
            one,
            1,
            false,
            vec![window_length()],
        ),
        ts(
            ids::ACCELERATION,
            "Acceleration",
            one,
            1,
            false,
            vec![time_scaling()],
        ),
        ts(ids::ADDTS, "Addition of time series", many, 1, false, vec![]),
        ts(ids::SIGNIN, "Change sign", one, 1, false, vec![]),
        ts(ids::ROOT, "Compute square root", one, 1, false, vec![]),
        ts(
            ids::TREND,
            "Compute trend",
            one,
            1,
            false,
            vec![real_pair("smoothing")],
        ),
        ts(ids::DIFF, "Difference of two time series", two, 1, false, vec![]),
        ts(
            ids::STDTS,
            "Estimate standard deviation",
            one,
            1,
            false,
            vec![real_triple("smoothing")],
        ),
        ts(ids::FIL_MAX, "Filtered maximum", one, 1, false, vec![]),
        ts(ids::FIL_MIN, "Filtered minimum", one, 1, false, vec![]),
        ts(
            ids::FIL,
            "Filtering",
            one,
            1,
            false,
            vec![
                enumeration("filter_type", &["lowpass", "highpass", "bandpass"], "lowpass"),
                real_pair("frequencies"),
                integer("order", Some(2)),
                enumeration("init", &["zero", "steady-state"], "steady-state"),
            ],
        ),
        ts(
            ids::MORL,
            "Filtering with Morlet wavelet",
            one,
            1,
            false,
            vec![
                positive_real("center_freq"),
                positive_real("eigen_freq"),
                yes_no("causal", "no"),
            ],
        ),
        ts(ids::IIR, "IIR filter", one, 1, false, vec![real("a")]),
        ts(
            ids::NABW,
            "Individual norm deviation",
            one,
            1,
            false,
            vec![real_triple("smoothing")],
        ),
        ts(ids::JERK, "Jerk", one, 1, false, vec![time_scaling()]),
        ts(ids::ZEROJUMP, "Jump to zero", one, 1, false, vec![]),
        ts(ids::LOG10, "Logarithm 10 TS", one, 1, false, vec![]),
        ts(
            ids::FE_MAX,
            "Maximum of a window",
            one,
            1,
            false,
            vec![window_length()],
        ),
        ts(
            ids::MAXTS,
            "Maximum of multiple time series",
            many,
            1,
            false,
            vec![],
        ),
        ts(
            ids::FE_MEAN,
            "Mean of a window",
            one,
            1,
            false,
            vec![window_length()],
        ),
        ts(
            ids::MEANTS,
            "Mean value of multiple time series",
            many,
            1,
            false,
            vec![],
        ),
        ts(
            ids::FE_MED,
            "Median of a window",
            one,
            1,
            false,
            vec![window_length()],
        ),
        ts(
            ids::FE_MIN,
            "Minimum of a window",
            one,
            1,
            false,
            vec![window_length()],
        ),
        ts(
            ids::MINTS,
            "Minimum of multiple time series",
            many,
            1,
            false,
            vec![],
        ),
        ts(
            ids::MULTTS,
            "Multiplication of time series",
            many,
            1,
            false,
            vec![],
        ),
        ts(
            ids::CONST,
            "Multiplication with a constant",
            one,
            1,
            false,
            vec![real("gain")],
        ),
        ts(
            ids::NDTS_ABS,
            "Norm deviation time series absolute value",
            one,
            1,
            false,
            vec![],
        ),
        ts(ids::NDTS, "Norm time series", one, 1, false, vec![]),
        ts(
            ids::NORM,
            "Normalized time series",
            one,
            1,
            false,
            vec![enumeration(
                "kind",
                &["minmax", "zscore", "maxabs", "mean"],
                "minmax",
            )],
        ),
        ts(ids::NORMMEAN, "Normalized to mean value", one, 1, false, vec![]),
        ts(
            ids::FE_ROM,
            "ROM of a window",
            one,
            1,
            false,
            vec![window_length()],
        ),
        ts(
            ids::RELRAT,
            "Relative ratio of two time series",
            two,
            1,
            false,
            vec![],
        ),
        ts(
            ids::DETREND,
            "Remove trend",
            one,
            1,
            false,
            vec![enumeration("method", &["linear", "constant"], "linear")],
        ),
        ts(ids::SORT_TS, "Sorted time series", one, 1, false, vec![]),
        ts(ids::SQR, "Square", one, 1, false, vec![]),
        ts(
            ids::TS_DISCR_TS,
            "TS->DISCR TS",
            one,
            1,
            true,
            membership_params(),
        ),
        ts(
            ids::TS_PC_TS,
            "TS->PC TS",
            many,
            2,
            false,
            vec![
                positive_integer("components", Some(1)),
                yes_no("normalize", "no"),
                yes_no("shared", "yes"),
            ],
        ),
        ts(
            ids::SHIFT,
            "Time shift",
            one,
            1,
            false,
            vec![integer("shift", None)],
        ),
        ts(
            ids::REGION,
            "Value in region",
            one,
            1,
            false,
            vec![real("lower"), real("upper")],
        ),
        ts(
            ids::THRES,
            "Value larger than threshold",
            one,
            1,
            false,
            vec![real("threshold")],
        ),
        ts(ids::VELOCITY, "Velocity", one, 1, false, vec![time_scaling()]),
        ts(
            ids::VELOCITY_CAUSAL,
            "Velocity (causal)",
            one,
            1,
            false,
            vec![time_scaling()],
        ),
        ts(
            ids::WAVEDEC,
            "Wavedec",
            one,
            5,
            false,
            vec![
                enumeration("wavelet", &["haar", "db2", "db4"], "haar"),
                integer("levels", Some(4)),
                enumeration("boundary", &["symmetric", "periodic"], "symmetric"),
            ],
        ),
    ]
}
