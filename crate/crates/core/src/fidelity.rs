//! End-to-end fidelity of a linear chain of entanglement swaps.
//!
//! Every link carries a Werner pair of fidelity `F`, i.e. Werner parameter
//! `w = (4F - 1) / 3`. A swap at a node with noise rate `η` multiplies the
//! parameters of the two pairs it joins and contracts the result by
//! `(4η² - 1) / 3`. A path through `N` swapping nodes therefore uses `N + 1`
//! links and ends with fidelity `(1 + 3 w_end) / 4`.

use crate::error::{Error, Result};
use crate::topology::NoiseClass;

/// Initial fidelity of each generated EPR pair, in `(0.25, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LinkFidelity(f64);

impl LinkFidelity {
    pub fn new(f: f64) -> Result<Self> {
        if f.is_finite() && f > 0.25 && f <= 1.0 {
            Ok(Self(f))
        } else {
            Err(Error::Domain(format!(
                "link fidelity {f} outside (0.25, 1]"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Werner parameter `(4F - 1) / 3` of a single link.
    pub fn werner(self) -> f64 {
        fidelity_to_werner(self.0)
    }
}

impl Default for LinkFidelity {
    fn default() -> Self {
        Self(0.975)
    }
}

pub fn fidelity_to_werner(f: f64) -> f64 {
    (4.0 * f - 1.0) / 3.0
}

pub fn werner_to_fidelity(w: f64) -> f64 {
    (1.0 + 3.0 * w) / 4.0
}

/// Contraction `(4η² - 1) / 3` applied by a swap at a node of noise rate `η`.
pub fn swap_contraction(eta: f64) -> f64 {
    (4.0 * eta * eta - 1.0) / 3.0
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.5 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("noise rate {eta} outside (0.5, 1]")))
    }
}

/// Number of swapping nodes of each noise class along a path.
///
/// Endpoints are not counted: only transport nodes perform swaps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PathComposition {
    class_counts: Vec<(NoiseClass, usize)>,
}

impl PathComposition {
    pub fn new() -> Self {
        Self::default()
    }

    /// Tallies the classes of the swapping nodes of a path. Classes are
    /// identified by label.
    pub fn from_classes<'a>(classes: impl IntoIterator<Item = &'a NoiseClass>) -> Self {
        let mut comp = Self::new();
        for class in classes {
            comp.add(class, 1);
        }
        comp
    }

    pub fn add(&mut self, class: &NoiseClass, count: usize) {
        match self
            .class_counts
            .iter_mut()
            .find(|(c, _)| c.label() == class.label())
        {
            Some((_, n)) => *n += count,
            None => self.class_counts.push((class.clone(), count)),
        }
    }

    pub fn with(mut self, class: &NoiseClass, count: usize) -> Self {
        self.add(class, count);
        self
    }

    pub fn class_counts(&self) -> &[(NoiseClass, usize)] {
        &self.class_counts
    }

    pub fn count_of(&self, label: &str) -> usize {
        self.class_counts
            .iter()
            .find(|(c, _)| c.label() == label)
            .map_or(0, |(_, n)| *n)
    }

    pub fn total_nodes(&self) -> usize {
        self.class_counts.iter().map(|(_, n)| n).sum()
    }
}

/// Closed-form end-to-end fidelity of a path with the given composition.
pub fn end_to_end_fidelity(comp: &PathComposition, link: LinkFidelity) -> f64 {
    let node_factor: f64 = comp
        .class_counts
        .iter()
        .map(|(class, n)| swap_contraction(class.eta()).powi(*n as i32))
        .product();
    let links = comp.total_nodes() as i32 + 1;
    werner_to_fidelity(node_factor * link.werner().powi(links))
}

/// Two-class specialisation: `n_h` nodes of noise rate `eta_h` and `n_l`
/// nodes of noise rate `eta_l`.
pub fn two_class_fidelity(
    n_h: usize,
    n_l: usize,
    eta_h: f64,
    eta_l: f64,
    link: LinkFidelity,
) -> Result<f64> {
    check_eta(eta_h)?;
    check_eta(eta_l)?;
    let w = swap_contraction(eta_h).powi(n_h as i32)
        * swap_contraction(eta_l).powi(n_l as i32)
        * link.werner().powi((n_h + n_l + 1) as i32);
    Ok(werner_to_fidelity(w))
}

/// Folds the swaps left to right, one node at a time, starting from the
/// first link. Independent of the closed form; used to cross-check it.
pub fn iterate_swaps(node_etas: &[f64], link: LinkFidelity) -> Result<f64> {
    let link_w = link.werner();
    let mut w = link_w;
    for &eta in node_etas {
        check_eta(eta)?;
        w = swap_contraction(eta) * w * link_w;
    }
    Ok(werner_to_fidelity(w))
}
