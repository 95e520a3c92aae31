use crate::constants::{EPS_R_SI, EPS_R_SIO2, NM};
use crate::{Error, Result};

/// Layer material of one mesh element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Material {
    Ferroelectric,
    Interlayer,
    Semiconductor,
    BuriedOxide,
}

/// Net channel doping, positive for donors and negative for acceptors (cm^-3).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Doping(pub f64);

impl Doping {
    pub fn donor(n_cm3: f64) -> Self {
        Self(n_cm3.abs())
    }

    pub fn acceptor(n_cm3: f64) -> Self {
        Self(-n_cm3.abs())
    }

    pub fn intrinsic() -> Self {
        Self(0.0)
    }

    /// N_D - N_A in m^-3.
    pub fn net_per_m3(self) -> f64 {
        self.0 * crate::constants::PER_CM3
    }
}

/// Geometry and materials of one vertical gate-stack slice, gate to back
/// contact: ferroelectric / interlayer / channel / buried oxide.
#[derive(Debug, Clone, PartialEq)]
pub struct Stack1D {
    pub t_f: f64,
    pub t_il: f64,
    pub t_ch: f64,
    pub t_box: f64,
    pub eps_r_f: f64,
    pub eps_r_il: f64,
    pub eps_r_ch: f64,
    pub eps_r_box: f64,
    pub doping: Doping,
    /// Gate work function (eV).
    pub gate_work_function: f64,
    /// Back-contact work function (eV).
    pub back_work_function: f64,
    pub temperature: f64,
}

impl Stack1D {
    /// Thin-film SOI stack: 10 nm ferroelectric, 1 nm IL, 6 nm channel, 30 nm BOX.
    pub fn soi() -> Self {
        Self {
            t_f: 10.0 * NM,
            t_il: 1.0 * NM,
            t_ch: 6.0 * NM,
            t_box: 30.0 * NM,
            eps_r_f: 30.0,
            eps_r_il: EPS_R_SIO2,
            eps_r_ch: EPS_R_SI,
            eps_r_box: EPS_R_SIO2,
            doping: Doping::intrinsic(),
            gate_work_function: 4.6,
            back_work_function: 4.6,
            temperature: 300.0,
        }
    }

    /// Back-end-of-line polysilicon stack with a 200 nm back oxide.
    pub fn beol(t_ch: f64, doping: Doping) -> Self {
        Self {
            t_ch,
            t_box: 200.0 * NM,
            doping,
            ..Self::soi()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, t) in [
            ("t_F", self.t_f),
            ("t_IL", self.t_il),
            ("t_ch", self.t_ch),
            ("t_BOX", self.t_box),
        ] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Configuration(format!("{name} must be positive, got {t}")));
            }
        }
        for (name, e) in [
            ("eps_r_F", self.eps_r_f),
            ("eps_r_IL", self.eps_r_il),
            ("eps_r_ch", self.eps_r_ch),
            ("eps_r_BOX", self.eps_r_box),
        ] {
            if !(e >= 1.0 && e.is_finite()) {
                return Err(Error::Configuration(format!("{name} must be >= 1, got {e}")));
            }
        }
        if !(self.temperature > 0.0) {
            return Err(Error::Configuration("temperature must be positive".into()));
        }
        if !self.doping.0.is_finite() {
            return Err(Error::Configuration("doping must be finite".into()));
        }
        Ok(())
    }

    pub fn eps_r(&self, m: Material) -> f64 {
        match m {
            Material::Ferroelectric => self.eps_r_f,
            Material::Interlayer => self.eps_r_il,
            Material::Semiconductor => self.eps_r_ch,
            Material::BuriedOxide => self.eps_r_box,
        }
    }
}

/// Nonuniform 1D mesh. Element `k` spans `x[k]..x[k+1]` and carries
/// `material[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub x: Vec<f64>,
    pub material: Vec<Material>,
}

impl Mesh {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn spacing(&self, k: usize) -> f64 {
        self.x[k + 1] - self.x[k]
    }

    /// Nodes touching at least one element of `m`.
    pub fn node_count(&self, m: Material) -> usize {
        (0..self.len())
            .filter(|&i| self.touches(i, m))
            .count()
    }

    pub fn touches(&self, node: usize, m: Material) -> bool {
        (node > 0 && self.material[node - 1] == m)
            || (node < self.material.len() && self.material[node] == m)
    }

    /// Length of the control volume of `node` lying inside material `m`.
    pub fn volume(&self, node: usize, m: Material) -> f64 {
        let mut v = 0.0;
        if node > 0 && self.material[node - 1] == m {
            v += 0.5 * self.spacing(node - 1);
        }
        if node < self.material.len() && self.material[node] == m {
            v += 0.5 * self.spacing(node);
        }
        v
    }

    /// First node after the last element of `m` (the interface below it).
    pub fn interface_after(&self, m: Material) -> Option<usize> {
        self.material.iter().rposition(|&e| e == m).map(|k| k + 1)
    }

    /// Mesh with a midpoint inserted in every element.
    pub fn bisected(&self) -> Self {
        let mut x = Vec::with_capacity(2 * self.len() - 1);
        let mut material = Vec::with_capacity(2 * self.material.len());
        for (k, &m) in self.material.iter().enumerate() {
            x.push(self.x[k]);
            x.push(0.5 * (self.x[k] + self.x[k + 1]));
            material.extend([m, m]);
        }
        x.push(*self.x.last().expect("mesh has nodes"));
        Self { x, material }
    }
}

const H_FE: f64 = 0.25 * NM;
const H_IL: f64 = 0.05 * NM;
const H_FINE: f64 = 0.125 * NM;
const H_CH_MAX: f64 = 1.0 * NM;
const H_BOX_MAX: f64 = 2.0 * NM;
const FINE_ZONE: f64 = 5.0 * NM;
const BACK_FINE_ZONE: f64 = 1.0 * NM;
const GROWTH: f64 = 1.2;

/// Build the slice mesh.
///
/// The ferroelectric and interlayer are uniform (0.25 nm and 0.05 nm). The
/// channel uses 0.125 nm within 5 nm of the interlayer and 1 nm of the back
/// oxide, growing roughly geometrically by 1.2 up to 1 nm elsewhere. The
/// buried oxide grows from 0.125 nm up to 2 nm away from the channel. The
/// interlayer and channel spacings are fine enough that halving them moves
/// the inversion density by well under 0.5 % across the ±3 V range.
pub fn build_mesh(stack: &Stack1D) -> Result<Mesh> {
    stack.validate()?;
    let mut mesh = Mesh {
        x: vec![0.0],
        material: Vec::new(),
    };
    push_uniform(&mut mesh, stack.t_f, H_FE, 3, Material::Ferroelectric);
    push_uniform(&mut mesh, stack.t_il, H_IL, 5, Material::Interlayer);
    let t_ch = stack.t_ch;
    let ch = graded(t_ch, |d| {
        let from_il = grow(d - FINE_ZONE);
        let from_box = grow(t_ch - d - BACK_FINE_ZONE);
        from_il.min(from_box).min(H_CH_MAX)
    });
    let ch = ensure_min_elements(ch, t_ch, 9);
    push_positions(&mut mesh, &ch, Material::Semiconductor);
    let bx = graded(stack.t_box, |d| grow(d).min(H_BOX_MAX));
    push_positions(&mut mesh, &bx, Material::BuriedOxide);

    if mesh.x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Configuration("degenerate mesh geometry".into()));
    }
    Ok(mesh)
}

/// Spacing at distance `d` past the end of a fine zone.
fn grow(d: f64) -> f64 {
    H_FINE + (GROWTH - 1.0) * d.max(0.0)
}

fn push_uniform(mesh: &mut Mesh, t: f64, h: f64, min_elems: usize, m: Material) {
    let n = ((t / h).round() as usize).max(min_elems);
    let rel: Vec<f64> = (1..=n).map(|k| t * k as f64 / n as f64).collect();
    push_positions(mesh, &rel, m);
}

fn push_positions(mesh: &mut Mesh, rel: &[f64], m: Material) {
    let x0 = *mesh.x.last().expect("mesh starts with a node");
    for &r in rel {
        mesh.x.push(x0 + r);
        mesh.material.push(m);
    }
}

/// March `spacing(d)` across a layer of thickness `t` until it is covered,
/// then shrink the positions so the last node lands on `t`. Returns positions
/// relative to the layer start, excluding 0.
fn graded(t: f64, spacing: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut pos = Vec::new();
    let mut d = 0.0;
    while d < t * (1.0 - 1e-9) {
        d += spacing(d);
        pos.push(d);
    }
    let scale = t / d;
    pos.iter().map(|p| p * scale).collect()
}

fn ensure_min_elements(pos: Vec<f64>, t: f64, min: usize) -> Vec<f64> {
    if pos.len() >= min {
        return pos;
    }
    (1..=min).map(|k| t * k as f64 / min as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soi_node_count_in_range() {
        let m = build_mesh(&Stack1D::soi()).unwrap();
        assert!((80..=400).contains(&m.len()), "{} nodes", m.len());
        assert!(m.node_count(Material::Interlayer) >= 10);
        assert!(m.node_count(Material::Semiconductor) >= 10);
        assert!(m.node_count(Material::Ferroelectric) >= 3);
    }

    #[test]
    fn layers_end_at_exact_positions() {
        let s = Stack1D::beol(80.0 * NM, Doping::donor(1e17));
        let m = build_mesh(&s).unwrap();
        let fi = m.interface_after(Material::Ferroelectric).unwrap();
        let is = m.interface_after(Material::Interlayer).unwrap();
        let sb = m.interface_after(Material::Semiconductor).unwrap();
        assert!((m.x[fi] - s.t_f).abs() < 1e-20);
        assert!((m.x[is] - s.t_f - s.t_il).abs() < 1e-20);
        assert!((m.x[sb] - s.t_f - s.t_il - s.t_ch).abs() < 1e-20);
        let total = s.t_f + s.t_il + s.t_ch + s.t_box;
        assert!((m.x.last().unwrap() - total).abs() < 1e-20);
        assert!(m.len() < 1000);
    }

    #[test]
    fn spacing_rules() {
        let s = Stack1D::beol(40.0 * NM, Doping::donor(1e16));
        let m = build_mesh(&s).unwrap();
        let start = s.t_f + s.t_il;
        for k in 0..m.material.len() {
            let h = m.spacing(k);
            match m.material[k] {
                Material::Interlayer => assert!((h - 0.05 * NM).abs() < 1e-6 * NM),
                Material::Semiconductor => {
                    assert!(h <= 1.0 * NM * 1.05);
                    if m.x[k + 1] - start <= 5.0 * NM {
                        assert!(h < 0.135 * NM, "h {h} at {}", m.x[k]);
                    }
                }
                Material::BuriedOxide => assert!(h <= 2.0 * NM * 1.05),
                Material::Ferroelectric => {}
            }
        }
    }

    #[test]
    fn deterministic_and_strictly_increasing() {
        let a = build_mesh(&Stack1D::soi()).unwrap();
        let b = build_mesh(&Stack1D::soi()).unwrap();
        assert_eq!(a, b);
        assert!(a.x.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(a.material.len() + 1, a.x.len());
    }

    #[test]
    fn bisection_halves_spacing() {
        let a = build_mesh(&Stack1D::soi()).unwrap();
        let b = a.bisected();
        assert_eq!(b.len(), 2 * a.len() - 1);
        assert!((b.spacing(0) - 0.5 * a.spacing(0)).abs() < 1e-20);
        assert_eq!(b.interface_after(Material::Interlayer).unwrap(), 2 * a.interface_after(Material::Interlayer).unwrap());
    }

    #[test]
    fn control_volumes_tile_each_layer() {
        let s = Stack1D::soi();
        let m = build_mesh(&s).unwrap();
        let sum = |mat| (0..m.len()).map(|i| m.volume(i, mat)).sum::<f64>();
        assert!((sum(Material::Semiconductor) - s.t_ch).abs() < 1e-20);
        assert!((sum(Material::Interlayer) - s.t_il).abs() < 1e-20);
    }

    #[test]
    fn rejects_degenerate_geometry() {
        let mut s = Stack1D::soi();
        s.t_il = 0.0;
        assert!(build_mesh(&s).is_err());
        let mut s = Stack1D::soi();
        s.eps_r_box = 0.5;
        assert!(build_mesh(&s).is_err());
    }
}
