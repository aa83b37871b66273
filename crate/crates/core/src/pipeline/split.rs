use super::ScaledState;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::FRAC_TOL;

/// Close/distant decomposition of one client's residual connection.
///
/// The close part takes the nearest `rbar_j` units of `xbar_j` in
/// (distance, index) order; the distant part is the remainder. At most one
/// facility (the boundary) carries both.
#[derive(Debug, Clone, PartialEq)]
pub struct ClientSplit {
    pub client: usize,
    pub rbar: usize,
    /// Close facilities with their close weight, nearest first.
    pub close: Vec<(usize, f64)>,
    /// Distant facilities with their distant weight, nearest first.
    pub distant: Vec<(usize, f64)>,
    /// Distance to the farthest close facility.
    pub d_max: f64,
    /// Average distance under `xbar_j`.
    pub d_avg: f64,
    pub d_close: f64,
    /// `None` when there is no distant mass.
    pub d_distant: Option<f64>,
    /// `(d_avg - d_close) / d_avg`, 0 when `d_avg = 0`.
    pub r_gap: f64,
}

impl ClientSplit {
    /// The facility that is both close and distant, if any.
    pub fn boundary(&self) -> Option<usize> {
        let (last, _) = *self.close.last()?;
        self.distant.iter().any(|&(i, _)| i == last).then_some(last)
    }

    pub fn is_close(&self, facility: usize) -> bool {
        self.close.iter().any(|&(i, _)| i == facility)
    }

    pub fn close_weight(&self, facility: usize) -> f64 {
        self.close
            .iter()
            .find(|&&(i, _)| i == facility)
            .map_or(0.0, |&(_, w)| w)
    }
}

/// Split every client with `rbar_j > 0`; other clients map to `None`.
pub fn split_close_distant(st: &ScaledState, inst: &Instance) -> Result<Vec<Option<ClientSplit>>> {
    (0..inst.num_clients())
        .map(|j| {
            if st.rbar[j] == 0 {
                Ok(None)
            } else {
                split_client(j, st.rbar[j], &st.xbar[j], inst).map(Some)
            }
        })
        .collect()
}

fn split_client(j: usize, rbar: usize, xbar: &[f64], inst: &Instance) -> Result<ClientSplit> {
    let mut remaining = rbar as f64;
    let mut close = Vec::new();
    let mut distant = Vec::new();
    for i in inst.facilities_by_distance(j) {
        let x = xbar[i];
        if x <= 0.0 {
            continue;
        }
        if remaining <= 0.0 {
            distant.push((i, x));
        } else if x <= remaining + FRAC_TOL {
            close.push((i, x));
            remaining -= x;
            if remaining < FRAC_TOL {
                remaining = 0.0;
            }
        } else {
            close.push((i, remaining));
            distant.push((i, x - remaining));
            remaining = 0.0;
        }
    }
    if remaining > 0.0 {
        return Err(Error::internal(
            "split",
            format!("client {j}: residual mass short of rbar = {rbar} by {remaining}"),
        ));
    }
    let weighted = |part: &[(usize, f64)]| -> (f64, f64) {
        part.iter().fold((0.0, 0.0), |(num, den), &(i, w)| {
            (num + w * inst.dist(i, j), den + w)
        })
    };
    let (cn, cd) = weighted(&close);
    let (dn, dd) = weighted(&distant);
    let d_avg = (cn + dn) / (cd + dd);
    let d_close = cn / cd;
    let d_distant = (dd > 0.0).then(|| dn / dd);
    let r_gap = if d_avg > 0.0 {
        (d_avg - d_close) / d_avg
    } else {
        0.0
    };
    let d_max = inst.dist(close.last().expect("rbar > 0 gives a close facility").0, j);
    Ok(ClientSplit {
        client: j,
        rbar,
        close,
        distant,
        d_max,
        d_avg,
        d_close,
        d_distant,
        r_gap,
    })
}

/// Special clients (residual requirement 1, special facility among the close
/// ones) and the remaining active clients that take part in clustering.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Classification {
    pub special: Vec<usize>,
    pub clustered: Vec<usize>,
}

pub fn classify_clients(st: &ScaledState, splits: &[Option<ClientSplit>]) -> Result<Classification> {
    let mut out = Classification::default();
    for (j, split) in splits.iter().enumerate() {
        let Some(split) = split else { continue };
        let special_close = st.special[j].is_some_and(|s| split.is_close(s));
        if special_close && split.rbar == 1 {
            out.special.push(j);
        } else if special_close {
            return Err(Error::internal(
                "classify",
                format!(
                    "client {j} with rbar = {} has special facility {} among its close facilities (gamma = {})",
                    split.rbar,
                    st.special[j].unwrap(),
                    st.gamma
                ),
            ));
        } else {
            out.clustered.push(j);
        }
    }
    Ok(out)
}
