#include "emgtcn/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace emgtcn {
namespace {

constexpr int kFormatVersion = 1;

void write_double(std::ostream& out, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  out << buf;
}

double read_double(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) {
    throw std::runtime_error(std::string("checkpoint: truncated ") + what);
  }
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    throw std::runtime_error("checkpoint: bad number '" + tok + "'");
  }
  return v;
}

long read_int(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) {
    throw std::runtime_error(std::string("checkpoint: truncated ") + what);
  }
  try {
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) {
      throw std::invalid_argument(tok);
    }
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("checkpoint: bad integer '" + tok + "'");
  }
}

std::string read_word(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) {
    throw std::runtime_error(std::string("checkpoint: truncated ") + what);
  }
  return tok;
}

const Matrix* find_tensor(const ModelCheckpoint& cp, const std::string& name) {
  for (const auto& [tensor_name, tensor] : cp.tensors) {
    if (tensor_name == name) {
      return &tensor;
    }
  }
  return nullptr;
}

void require_kind(const ModelCheckpoint& cp, const std::string& kind) {
  if (cp.kind != kind) {
    throw std::runtime_error("checkpoint: expected kind '" + kind +
                             "', found '" + cp.kind + "'");
  }
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream msg;
    msg << "checkpoint: tensor '" << name << "' is " << m.rows() << "x"
        << m.cols() << ", expected " << rows << "x" << cols;
    throw std::runtime_error(msg.str());
  }
}

}  // namespace

const Matrix& ModelCheckpoint::tensor(const std::string& name) const {
  const Matrix* m = find_tensor(*this, name);
  if (m == nullptr) {
    throw std::runtime_error("checkpoint: missing tensor '" + name + "'");
  }
  return *m;
}

void save_checkpoint(const ModelCheckpoint& cp, const std::string& path) {
  if (cp.kind.empty()) {
    throw std::invalid_argument("checkpoint: empty kind tag");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("checkpoint: cannot open '" + path +
                             "' for writing");
  }
  out << "emgtcn-model " << kFormatVersion << "\n";
  out << "kind " << cp.kind << "\n";
  out << "feature_mode " << feature_mode_name(cp.feature_mode) << "\n";
  out << "window_len " << cp.window_len << "\n";
  out << "step " << cp.step << "\n";
  out << "sequence_len " << cp.sequence_len << "\n";
  out << "sample_rate " << cp.sample_rate << "\n";
  out << "channels " << cp.channels << "\n";
  out << "feature_eps ";
  write_double(out, cp.feature_eps);
  out << "\n";
  out << "knn_k " << cp.knn_k << "\n";
  out << "epochs " << cp.train.epochs << "\n";
  out << "learning_rate ";
  write_double(out, cp.train.learning_rate);
  out << "\n";
  out << "batch_size " << cp.train.batch_size << "\n";
  out << "seed " << cp.train.seed << "\n";
  out << "optimizer " << optimizer_name(cp.train.optimizer) << "\n";
  out << "final_column_loss " << (cp.train.final_column_loss ? 1 : 0) << "\n";
  for (const auto& [name, tensor] : cp.tensors) {
    out << "tensor " << name << " " << tensor.rows() << " " << tensor.cols()
        << "\n";
    for (Eigen::Index i = 0; i < tensor.rows(); ++i) {
      for (Eigen::Index j = 0; j < tensor.cols(); ++j) {
        if (j > 0) {
          out << " ";
        }
        write_double(out, tensor(i, j));
      }
      out << "\n";
    }
  }
  if (!cp.labels.empty()) {
    out << "labels " << cp.labels.size() << "\n";
    for (std::size_t i = 0; i < cp.labels.size(); ++i) {
      if (i > 0) {
        out << " ";
      }
      out << cp.labels[i];
    }
    out << "\n";
  }
  out << "end\n";
  if (!out) {
    throw std::runtime_error("checkpoint: write to '" + path + "' failed");
  }
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("checkpoint: cannot open '" + path + "'");
  }
  if (read_word(in, "magic") != "emgtcn-model") {
    throw std::runtime_error("checkpoint: '" + path +
                             "' is not a model file");
  }
  if (read_int(in, "version") != kFormatVersion) {
    throw std::runtime_error("checkpoint: unsupported format version");
  }
  ModelCheckpoint cp;
  std::string key;
  while (true) {
    key = read_word(in, "record key");
    if (key == "end") {
      break;
    } else if (key == "kind") {
      cp.kind = read_word(in, "kind");
    } else if (key == "feature_mode") {
      cp.feature_mode = parse_feature_mode(read_word(in, "feature_mode"));
    } else if (key == "window_len") {
      cp.window_len = static_cast<int>(read_int(in, key.c_str()));
    } else if (key == "step") {
      cp.step = static_cast<int>(read_int(in, key.c_str()));
    } else if (key == "sequence_len") {
      cp.sequence_len = static_cast<int>(read_int(in, key.c_str()));
    } else if (key == "sample_rate") {
      cp.sample_rate = static_cast<int>(read_int(in, key.c_str()));
    } else if (key == "channels") {
      cp.channels = static_cast<int>(read_int(in, key.c_str()));
    } else if (key == "feature_eps") {
      cp.feature_eps = read_double(in, key.c_str());
    } else if (key == "knn_k") {
      cp.knn_k = static_cast<int>(read_int(in, key.c_str()));
    } else if (key == "epochs") {
      cp.train.epochs = static_cast<int>(read_int(in, key.c_str()));
    } else if (key == "learning_rate") {
      cp.train.learning_rate = read_double(in, key.c_str());
    } else if (key == "batch_size") {
      cp.train.batch_size = static_cast<int>(read_int(in, key.c_str()));
    } else if (key == "seed") {
      const std::string tok = read_word(in, "seed");
      try {
        cp.train.seed = std::stoull(tok);
      } catch (const std::exception&) {
        throw std::runtime_error("checkpoint: bad seed '" + tok + "'");
      }
    } else if (key == "optimizer") {
      cp.train.optimizer = parse_optimizer(read_word(in, "optimizer"));
    } else if (key == "final_column_loss") {
      cp.train.final_column_loss = read_int(in, key.c_str()) != 0;
    } else if (key == "tensor") {
      const std::string name = read_word(in, "tensor name");
      const long rows = read_int(in, "tensor rows");
      const long cols = read_int(in, "tensor cols");
      if (rows < 0 || cols < 0) {
        throw std::runtime_error("checkpoint: negative tensor shape");
      }
      Matrix m(rows, cols);
      for (long i = 0; i < rows; ++i) {
        for (long j = 0; j < cols; ++j) {
          m(i, j) = read_double(in, "tensor value");
        }
      }
      cp.tensors.emplace_back(name, std::move(m));
    } else if (key == "labels") {
      const long n = read_int(in, "label count");
      if (n < 0) {
        throw std::runtime_error("checkpoint: negative label count");
      }
      cp.labels.resize(static_cast<std::size_t>(n));
      for (long i = 0; i < n; ++i) {
        cp.labels[static_cast<std::size_t>(i)] =
            static_cast<int>(read_int(in, "label"));
      }
    } else {
      throw std::runtime_error("checkpoint: unknown record '" + key + "'");
    }
  }
  if (cp.kind.empty()) {
    throw std::runtime_error("checkpoint: missing kind tag");
  }
  return cp;
}

ModelCheckpoint pack_tcn(const TcnParams& params) {
  ModelCheckpoint cp;
  cp.kind = "tcn";
  cp.tensors.emplace_back("w", params.w);
  cp.tensors.emplace_back("b", Matrix(params.b));
  cp.tensors.emplace_back("u", params.u);
  cp.tensors.emplace_back("c", Matrix(params.c));
  return cp;
}

TcnParams unpack_tcn(const ModelCheckpoint& cp) {
  require_kind(cp, "tcn");
  TcnParams params;
  params.w = cp.tensor("w");
  params.b = cp.tensor("b").col(0);
  params.u = cp.tensor("u");
  params.c = cp.tensor("c").col(0);
  const int filters = static_cast<int>(params.w.rows());
  const int classes = static_cast<int>(params.u.rows());
  const int features = feature_dim(cp.feature_mode, cp.channels);
  if (features <= 0 || params.w.cols() % features != 0) {
    throw std::runtime_error(
        "checkpoint: filter width inconsistent with feature mode");
  }
  params.hyper = TcnHyper{filters, static_cast<int>(params.w.cols()) / features,
                          features, classes};
  require_shape(cp.tensor("b"), filters, 1, "b");
  require_shape(cp.tensor("u"), classes, filters, "u");
  require_shape(cp.tensor("c"), classes, 1, "c");
  return params;
}

ModelCheckpoint pack_knn(const KnnModel& model) {
  ModelCheckpoint cp;
  cp.kind = "knn";
  cp.knn_k = model.k;
  cp.tensors.emplace_back("train_x", model.train_x);
  cp.labels = model.labels;
  return cp;
}

KnnModel unpack_knn(const ModelCheckpoint& cp) {
  require_kind(cp, "knn");
  const Matrix& train_x = cp.tensor("train_x");
  if (static_cast<Eigen::Index>(cp.labels.size()) != train_x.cols()) {
    throw std::runtime_error(
        "checkpoint: k-NN label count does not match training columns");
  }
  return knn_fit(train_x, cp.labels, cp.knn_k);
}

ModelCheckpoint pack_mlp(const MlpModel& model) {
  ModelCheckpoint cp;
  cp.kind = "mlp";
  for (std::size_t layer = 0; layer < model.w.size(); ++layer) {
    const std::string suffix = std::to_string(layer);
    cp.tensors.emplace_back("w" + suffix, model.w[layer]);
    cp.tensors.emplace_back("b" + suffix, Matrix(model.b[layer]));
  }
  return cp;
}

MlpModel unpack_mlp(const ModelCheckpoint& cp) {
  require_kind(cp, "mlp");
  MlpModel model;
  for (std::size_t layer = 0;; ++layer) {
    const std::string suffix = std::to_string(layer);
    const Matrix* w = find_tensor(cp, "w" + suffix);
    if (w == nullptr) {
      break;
    }
    const Matrix& b = cp.tensor("b" + suffix);
    require_shape(b, w->rows(), 1, "b" + suffix);
    if (layer > 0 && w->cols() != model.w.back().rows()) {
      throw std::runtime_error("checkpoint: MLP layer shapes do not chain");
    }
    model.w.push_back(*w);
    model.b.push_back(b.col(0));
  }
  if (model.w.empty()) {
    throw std::runtime_error("checkpoint: MLP checkpoint has no layers");
  }
  return model;
}

}  // namespace emgtcn
