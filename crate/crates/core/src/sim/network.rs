//! Layered Gaussian relay network: one source, one destination, real scalar
//! gains between adjacent layers, unit noise power.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Topology file format:
/// `{"layers": [["s"],["r1","r2"],["d"]], "gains": {"r1": {"s": 1.0}, ...}, "P": 1.0}`
/// with gains keyed receiver -> sender -> h.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopologySpec {
    pub layers: Vec<Vec<String>>,
    pub gains: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(rename = "P")]
    pub power: f64,
}

/// Validated layered network. Node indices are assigned in layer order.
#[derive(Debug, Clone)]
pub struct LayeredNetwork {
    names: Vec<String>,
    layer_of: Vec<usize>,
    layers: Vec<Vec<usize>>,
    /// gain[(receiver, sender)], nonzero only across adjacent layers.
    gains: BTreeMap<(usize, usize), f64>,
    power: f64,
    noise_var: f64,
}

impl LayeredNetwork {
    pub fn from_spec(spec: &TopologySpec) -> Result<LayeredNetwork> {
        if spec.layers.len() < 2 {
            return Err(Error::Config("a network needs at least source and destination layers".into()));
        }
        if spec.layers[0].len() != 1 {
            return Err(Error::Config("layer 0 must contain exactly the source".into()));
        }
        if spec.layers.last().unwrap().len() != 1 {
            return Err(Error::Config("the last layer must contain exactly the destination".into()));
        }
        if !(spec.power > 0.0) || !spec.power.is_finite() {
            return Err(Error::Config("transmit power P must be positive".into()));
        }
        let mut names = Vec::new();
        let mut layer_of = Vec::new();
        let mut layers = Vec::new();
        let mut index = BTreeMap::new();
        for (l, layer) in spec.layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(Error::Config(format!("layer {l} is empty")));
            }
            let mut ids = Vec::new();
            for name in layer {
                if index.contains_key(name) {
                    return Err(Error::Config(format!("duplicate node id {name}")));
                }
                index.insert(name.clone(), names.len());
                ids.push(names.len());
                layer_of.push(l);
                names.push(name.clone());
            }
            layers.push(ids);
        }
        let mut gains = BTreeMap::new();
        for (recv, senders) in &spec.gains {
            let &ri = index
                .get(recv)
                .ok_or_else(|| Error::Config(format!("gain receiver {recv} is not a node")))?;
            for (send, h) in senders {
                let &si = index
                    .get(send)
                    .ok_or_else(|| Error::Config(format!("gain sender {send} is not a node")))?;
                if !h.is_finite() {
                    return Err(Error::Config(format!("gain {recv}<-{send} is not finite")));
                }
                if layer_of[ri] != layer_of[si] + 1 {
                    return Err(Error::Config(format!(
                        "gain {recv}<-{send} does not respect layering"
                    )));
                }
                if *h != 0.0 {
                    gains.insert((ri, si), *h);
                }
            }
        }
        Ok(LayeredNetwork { names, layer_of, layers, gains, power: spec.power, noise_var: 1.0 })
    }

    pub fn spec(&self) -> TopologySpec {
        let mut gains: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for (&(r, s), &h) in &self.gains {
            gains
                .entry(self.names[r].clone())
                .or_default()
                .insert(self.names[s].clone(), h);
        }
        TopologySpec {
            layers: self
                .layers
                .iter()
                .map(|ids| ids.iter().map(|&i| self.names[i].clone()).collect())
                .collect(),
            gains,
            power: self.power,
        }
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn layer(&self, l: usize) -> &[usize] {
        &self.layers[l]
    }

    pub fn layer_of(&self, node: usize) -> usize {
        self.layer_of[node]
    }

    pub fn name(&self, node: usize) -> &str {
        &self.names[node]
    }

    pub fn source(&self) -> usize {
        self.layers[0][0]
    }

    pub fn destination(&self) -> usize {
        *self.layers.last().unwrap().last().unwrap()
    }

    /// Relay node indices in layer order (everything but source and
    /// destination).
    pub fn relays(&self) -> Vec<usize> {
        let d = self.destination();
        (0..self.names.len()).filter(|&i| i != self.source() && i != d).collect()
    }

    pub fn gain(&self, receiver: usize, sender: usize) -> f64 {
        self.gains.get(&(receiver, sender)).copied().unwrap_or(0.0)
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    /// Max received signal power over all receiving nodes:
    /// D_s = max_i sum_j h_ij^2 P.
    pub fn max_received_signal_power(&self) -> f64 {
        let mut best = 0.0f64;
        for l in 1..self.layers.len() {
            for &i in &self.layers[l] {
                let mut acc = 0.0;
                for &j in &self.layers[l - 1] {
                    let h = self.gain(i, j);
                    acc += h * h * self.power;
                }
                best = best.max(acc);
            }
        }
        best
    }

    /// Combined input sum_j h_ij x_j at node i from per-node vectors of the
    /// previous layer (in that layer's node order).
    pub fn combine_inputs(&self, receiver: usize, prev_layer: &[usize], x: &[Vec<f64>]) -> Vec<f64> {
        let n = x.first().map_or(0, |v| v.len());
        let mut acc = vec![0.0; n];
        for (slot, &j) in prev_layer.iter().enumerate() {
            let h = self.gain(receiver, j);
            if h != 0.0 {
                crate::linalg::axpy(h, &x[slot], &mut acc);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn line_spec(h1: f64, h2: f64, p: f64) -> TopologySpec {
        serde_json::from_value(serde_json::json!({
            "layers": [["s"], ["r1"], ["d"]],
            "gains": {"r1": {"s": h1}, "d": {"r1": h2}},
            "P": p,
        }))
        .unwrap()
    }

    #[test]
    fn parses_and_validates_line() {
        let net = LayeredNetwork::from_spec(&line_spec(1.0, 2.0, 1.0)).unwrap();
        assert_eq!(net.num_nodes(), 3);
        assert_eq!(net.relays(), vec![1]);
        assert_eq!(net.gain(1, 0), 1.0);
        assert_eq!(net.gain(2, 1), 2.0);
        assert_eq!(net.gain(2, 0), 0.0);
        assert_eq!(net.noise_var(), 1.0);
    }

    #[test]
    fn rejects_nonlayered_gains() {
        let mut spec = line_spec(1.0, 2.0, 1.0);
        spec.gains.entry("d".into()).or_default().insert("s".into(), 0.5);
        assert!(LayeredNetwork::from_spec(&spec).is_err());
    }

    #[test]
    fn rejects_multi_source() {
        let spec: TopologySpec = serde_json::from_value(serde_json::json!({
            "layers": [["s", "x"], ["d"]],
            "gains": {},
            "P": 1.0,
        }))
        .unwrap();
        assert!(LayeredNetwork::from_spec(&spec).is_err());
    }

    #[test]
    fn d_s_is_max_received_power() {
        let spec: TopologySpec = serde_json::from_value(serde_json::json!({
            "layers": [["s"], ["a", "b"], ["d"]],
            "gains": {"a": {"s": 1.0}, "b": {"s": 3.0}, "d": {"a": 1.0, "b": 1.0}},
            "P": 2.0,
        }))
        .unwrap();
        let net = LayeredNetwork::from_spec(&spec).unwrap();
        // node b receives 9*2 = 18; d receives (1+1)*2 = 4.
        assert!((net.max_received_signal_power() - 18.0).abs() < 1e-12);
    }

    #[test]
    fn spec_roundtrip() {
        let spec = line_spec(1.5, -0.5, 2.0);
        let net = LayeredNetwork::from_spec(&spec).unwrap();
        let again = net.spec();
        assert_eq!(serde_json::to_string(&spec).unwrap(), serde_json::to_string(&again).unwrap());
    }
}
