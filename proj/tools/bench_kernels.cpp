// Times the OpenMP kernels against their serial references and the batch
// scorer against its serial twin. Output equality is asserted on the spot;
// the unit suites check the same invariants in CI.

#include <omp.h>

#include <cstdio>
#include <cstdlib>

#include "mindkit/eval.hpp"
#include "mindkit/image.hpp"
#include "mindkit/rng.hpp"
#include "mindkit/tasks.hpp"
#include "mindkit/tokens.hpp"

using namespace mindkit;

namespace {

Image make_pattern(int w, int h) {
    Image img(w, h, 0, 0, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::uint8_t* p = img.at(x, y);
            p[0] = static_cast<std::uint8_t>((x + y) & 0xff);
            p[1] = static_cast<std::uint8_t>(x & 0xff);
            p[2] = static_cast<std::uint8_t>(y & 0xff);
        }
    return img;
}

MindNode random_labeled_tree(Rng& rng, int size) {
    static const std::vector<std::string> labels = {"alpha", "beta", "gamma", "delta",
                                                    "epsilon"};
    struct Slot {
        std::string text;
        std::vector<int> children;
    };
    std::vector<Slot> arena(static_cast<std::size_t>(size));
    for (auto& s : arena) s.text = rng.pick(labels) + std::to_string(rng.below(50));
    for (int i = 1; i < size; ++i)
        arena[rng.below(static_cast<std::uint64_t>(i))].children.push_back(i);
    struct B {
        const std::vector<Slot>& arena;
        MindNode build(int i) const {
            MindNode n;
            n.text = arena[static_cast<std::size_t>(i)].text;
            for (int c : arena[static_cast<std::size_t>(i)].children)
                n.children.push_back(build(c));
            return n;
        }
    };
    return B{arena}.build(0);
}

template <class Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e30;
    for (int r = 0; r < reps; ++r) {
        double t0 = omp_get_wtime();
        fn();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s serial %8.3f ms   omp %8.3f ms   speedup %5.2fx\n", name,
                serial * 1e3, parallel * 1e3, serial / parallel);
}

} // namespace

int main(int argc, char** argv) {
    const int scale = argc > 1 ? std::atoi(argv[1]) : 1;
    std::printf("threads: %d, scale: %d\n\n", omp_get_max_threads(), scale);

    { // gaussian noise
        const int side = 2048 * scale;
        Image a = make_pattern(side, side);
        Image b = a;
        double ts = time_best_of(3, [&] {
            Image img = a;
            add_gaussian_noise_serial(img, 9.0, 42);
            b = std::move(img);
        });
        Image check;
        double tp = time_best_of(3, [&] {
            Image img = a;
            add_gaussian_noise(img, 9.0, 42);
            check = std::move(img);
        });
        if (!(check == b)) {
            std::fprintf(stderr, "noise kernels disagree\n");
            return 1;
        }
        report("gaussian_noise 2048^2", ts, tp);
    }

    { // paste
        Image dst_s(4096, 2048, 255, 255, 255);
        Image dst_p = dst_s;
        Image src = make_pattern(2048, 1536);
        double ts = time_best_of(5, [&] { paste_serial(dst_s, src, 512, 256); });
        double tp = time_best_of(5, [&] { paste(dst_p, src, 512, 256); });
        if (!(dst_s == dst_p)) {
            std::fprintf(stderr, "paste kernels disagree\n");
            return 1;
        }
        report("paste 2048x1536", ts, tp);
    }

    { // batch scoring: zss + field F1 over a prediction run
        Rng rng(7);
        std::vector<TaskInstance> manifest;
        std::vector<PredictionRecord> predictions;
        for (int i = 0; i < 150 * scale; ++i) {
            MindNode gold = random_labeled_tree(rng, 20 + static_cast<int>(rng.below(30)));
            MindNode pred = gold;
            // perturb a few labels so the distance is non-trivial
            visit_with_path(pred, [&](MindNode& n, const std::string&) {
                if (rng.chance(0.15)) n.text += "_x";
            });
            TaskInstance inst;
            inst.id = "b" + std::to_string(i);
            inst.task = Task::full_parse;
            inst.answer = serialize_tokens(gold);
            inst.node_count = tree_size(gold);
            manifest.push_back(std::move(inst));
            predictions.push_back({"b" + std::to_string(i), serialize_tokens(pred)});
        }
        std::string serial_json, parallel_json;
        double ts = time_best_of(2, [&] {
            serial_json = report_to_json(evaluate_run_serial(manifest, predictions)).dump();
        });
        double tp = time_best_of(2, [&] {
            parallel_json = report_to_json(evaluate_run(manifest, predictions)).dump();
        });
        if (serial_json != parallel_json) {
            std::fprintf(stderr, "evaluate_run outputs disagree\n");
            return 1;
        }
        report("evaluate_run 150 samples", ts, tp);
    }

    return 0;
}
