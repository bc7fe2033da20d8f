#include "train/metrics.hpp"

#include <fstream>
#include <stdexcept>

#include "dataio/csv.hpp"

namespace gs {

void write_metrics_csv(const std::string& path, const std::vector<EpochMetrics>& history,
                       Task task) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write metrics csv " + path);
    if (task == Task::kSlip) {
        out << "epoch,split,loss,slip_acc,crumple_acc,joint_acc\n";
        for (const EpochMetrics& m : history) {
            out << m.epoch << ",train," << format_double(m.train_loss) << ','
                << format_double(m.train_slip_accuracy) << ','
                << format_double(m.train_crumple_accuracy) << ','
                << format_double(m.train_accuracy) << '\n';
            out << m.epoch << ",val," << format_double(m.val_loss) << ','
                << format_double(m.val_slip_accuracy) << ','
                << format_double(m.val_crumple_accuracy) << ','
                << format_double(m.val_accuracy) << '\n';
        }
    } else {
        out << "epoch,split,loss,acc\n";
        for (const EpochMetrics& m : history) {
            out << m.epoch << ",train," << format_double(m.train_loss) << ','
                << format_double(m.train_accuracy) << '\n';
            out << m.epoch << ",val," << format_double(m.val_loss) << ','
                << format_double(m.val_accuracy) << '\n';
        }
    }
}

std::string json_quote(const std::string& value) {
    std::string out = "\"";
    for (char c : value) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_summary_json(const std::string& path,
                        const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write summary " + path);
    out << "{\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        out << "  " << json_quote(entries[i].first) << ": " << entries[i].second;
        if (i + 1 < entries.size()) out << ',';
        out << '\n';
    }
    out << "}\n";
}

}  // namespace gs
