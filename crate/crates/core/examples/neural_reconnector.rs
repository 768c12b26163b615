//! Tiled inference with an ONNX reconnecting model plugged into the solver.
//!
//! With a model path the model is used as is; it must take `(1, 1, H, W)`
//! and return the same shape with values in `[0, 1]`. Without one, a small
//! blur-and-squash model is written to a temporary file first.
//!
//! ```text
//! cargo run --release --example neural_reconnector [MODEL.onnx]
//! ```

use curvseg::metrics::evaluate;
use curvseg::reconnect::{Blend, NeuralReconnector, TileSpec};
use curvseg::solver::{segment, SolverConfig};
use curvseg::synthgen::{generate_pair, random_tree, render_two_level, GenParams};
use prost::Message;
use tract_onnx::pb;

fn dims(names: [&str; 4]) -> pb::TensorShapeProto {
    use pb::tensor_shape_proto::{dimension::Value, Dimension};
    let dim = names
        .iter()
        .map(|n| Dimension {
            denotation: String::new(),
            value: Some(match n.parse() {
                Ok(v) => Value::DimValue(v),
                Err(_) => Value::DimParam(n.to_string()),
            }),
        })
        .collect();
    pb::TensorShapeProto { dim }
}

fn io(name: &str) -> pb::ValueInfoProto {
    pb::ValueInfoProto {
        name: name.into(),
        r#type: Some(pb::TypeProto {
            denotation: String::new(),
            value: Some(pb::type_proto::Value::TensorType(pb::type_proto::Tensor {
                elem_type: pb::tensor_proto::DataType::Float as i32,
                shape: Some(dims(["1", "1", "h", "w"])),
            })),
        }),
        doc_string: String::new(),
    }
}

/// `sigmoid(8 * (mean3x3(x) - 0.4))`: fills one-cell gaps, drops isolated cells.
fn demo_model() -> pb::ModelProto {
    let tensor = |name: &str, dims: Vec<i64>, data: Vec<f32>| pb::TensorProto {
        name: name.into(),
        dims,
        data_type: pb::tensor_proto::DataType::Float as i32,
        float_data: data,
        ..Default::default()
    };
    let ints = |name: &str, v: Vec<i64>| pb::AttributeProto {
        name: name.into(),
        r#type: pb::attribute_proto::AttributeType::Ints as i32,
        ints: v,
        ..Default::default()
    };
    let graph = pb::GraphProto {
        name: "demo".into(),
        node: vec![
            pb::NodeProto {
                input: vec!["x".into(), "w".into(), "b".into()],
                output: vec!["z".into()],
                op_type: "Conv".into(),
                attribute: vec![ints("kernel_shape", vec![3, 3]), ints("pads", vec![1; 4])],
                ..Default::default()
            },
            pb::NodeProto {
                input: vec!["z".into()],
                output: vec!["y".into()],
                op_type: "Sigmoid".into(),
                ..Default::default()
            },
        ],
        initializer: vec![tensor("w", vec![1, 1, 3, 3], vec![8.0 / 9.0; 9]), tensor("b", vec![1], vec![-3.2])],
        input: vec![io("x")],
        output: vec![io("y")],
        ..Default::default()
    };
    pb::ModelProto {
        ir_version: 7,
        opset_import: vec![pb::OperatorSetIdProto {
            domain: String::new(),
            version: 13,
        }],
        graph: Some(graph),
        ..Default::default()
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = match std::env::args().nth(1) {
        Some(p) => p.into(),
        None => {
            let p = std::env::temp_dir().join("curvseg-demo-reconnector.onnx");
            std::fs::write(&p, demo_model().encode_to_vec())?;
            p
        }
    };
    let tiles = TileSpec::uniform(64, 16, Blend::Average);
    let model = NeuralReconnector::load(&path, 2, tiles)?;
    println!("loaded {}", model.path().display());

    let clean = random_tree(&[128, 128], 8, [1.0, 4.0], 9)?;
    let pair = generate_pair(&clean, &GenParams { seed: 9, ..GenParams::default() })?;
    let f = render_two_level(&pair.broken, 0.2, 0.8, 0.05, 9)?;
    let config = SolverConfig {
        lambda: 0.01,
        max_iter: 200,
        ..SolverConfig::default()
    };
    let (mask, state) = segment(&f, &config, &model)?;
    let r = evaluate("neural", &mask, &clean, None, true)?;
    println!(
        "{} iterations: dice {:.3}, b0 {} vs {} in the clean tree",
        state.iter, r.dice, r.betti_pred.b0, r.betti_gt.b0
    );
    Ok(())
}
