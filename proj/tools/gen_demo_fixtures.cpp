// Regenerates tests/fixtures/demo: the offline three-task benchmark used by
// the acceptance suite and documented in the README. Usage:
//   gen_demo_fixtures <output-dir>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hilbench/extract.hpp"
#include "hilbench/llm.hpp"

using namespace hilbench;
using nlohmann::json;

namespace {

const char* kBlinkPrompt =
    "You have an Arduino {board} with a photoresistor divider on pin A0 and the "
    "onboard LED on pin 13. Write a complete sketch that toggles the LED every "
    "500 ms and prints the raw ADC reading to serial once every 100 ms at 9600 "
    "baud. Print only the number, one reading per line.";

const char* kActuatorPrompt =
    "A linear actuator carries a VL53L0X distance sensor. Write a complete "
    "Arduino sketch that sweeps the actuator back and forth over its 5 cm "
    "stroke with a 4 s period and prints the measured distance in centimeters "
    "(three decimals) every 100 ms at 9600 baud, one value per line.";

const char* kImuPrompt =
    "An AXM240 accelerometer is mounted on a servo-tilted plate inclined 55 "
    "degrees from vertical. Write a complete Arduino sketch that reads the "
    "three axes every 100 ms and prints them at 9600 baud as three lines per "
    "sample: \"A_X = <g>\", \"A_Y = <g>\", \"A_Z = <g>\", each with four "
    "decimals. The servo angle is commanded over serial as \"servo=<deg>\".";

const char* kBlinkGood = R"(Here's a sketch that does both jobs on independent timers:

```cpp
const int sensorPin = A0;
unsigned long lastBlink = 0;
unsigned long lastSample = 0;
bool ledState = false;

void setup() {
  Serial.begin(9600);
  pinMode(13, OUTPUT);
}

void loop() {
  unsigned long now = millis();
  if (now - lastBlink >= 500) {
    lastBlink = now;
    ledState = !ledState;
    digitalWrite(13, ledState);
  }
  if (now - lastSample >= 100) {
    lastSample = now;
    Serial.println(analogRead(sensorPin));
  }
}
```

The two intervals never block each other, so the sample cadence stays at 100 ms.
)";

const char* kBlinkBroken = R"(This should work:

```cpp
const int sensorPin = A0

void setup() {
  Serial.begin(9600);
  pinMode(13, OUTPUT);
}

void loop() {
  digitalWrite(13, (millis() / 500) % 2);
  Serial.println(analogRead(sensorPin));
  delay(100);
}
```
)";

const char* kActuatorGood = R"(Drive the actuator with a triangle profile and report the sensor reading:

```cpp
#include <VL53L0X.h>

VL53L0X sensor;
const float STROKE_CM = 5.0;
const unsigned long PERIOD_MS = 4000;

void setup() {
  Serial.begin(9600);
  sensor.init();
  sensor.startContinuous();
}

void loop() {
  unsigned long t = millis() % PERIOD_MS;
  float phase = (float)t / PERIOD_MS;
  float target = phase < 0.5 ? phase * 2 * STROKE_CM : (1 - phase) * 2 * STROKE_CM;
  setActuator(target);
  Serial.println(sensor.readRangeContinuousMillimeters() / 10.0, 3);
  delay(100);
}
```

`setActuator` is whatever drive call your motor shield provides; the profile
itself is the triangle the task asks for.
)";

const char* kActuatorBroken = R"(Use the ultrasonic helper:

```cpp
#include <VL53L0X.h>

VL53L0X sensor;

void setup() {
  Serial.begin(9600);
  sensor.init();
}

void loop() {
  float cm = sensor.readRangeContinuousMillimeters( / 10.0;
  Serial.println(cm, 3);
  delay(100);
}
```
)";

const char* kImuGood = R"(Read the axes, honor the serial servo command, and print the labeled triplet:

```cpp
#include <Adafruit_AXM240.h>
#include <Servo.h>

Adafruit_AXM240 axm;
Servo tilt;

void setup() {
  Serial.begin(9600);
  axm.begin();
  tilt.attach(9);
  tilt.write(0);
}

void loop() {
  if (Serial.available()) {
    String cmd = Serial.readStringUntil('\n');
    if (cmd.startsWith("servo=")) tilt.write(cmd.substring(6).toInt());
  }
  Serial.print("A_X = ");
  Serial.println(axm.readX(), 4);
  Serial.print("A_Y = ");
  Serial.println(axm.readY(), 4);
  Serial.print("A_Z = ");
  Serial.println(axm.readZ(), 4);
  delay(100);
}
```
)";

const char* kImuBroken = R"(Something like this:

```cpp
#include <Adafruit_AXM240.h>

Adafruit_AXM240 axm;

void setup() {
  Serial.begin(9600);
  axm.begin();

void loop() {
  Serial.print("A_X = ");
  Serial.println(axm.readX(), 4);
  delay(100);
}
```
)";

json blink_task() {
    return json{
        {"id", "blink-photoresistor"},
        {"prompt", {{"text", kBlinkPrompt}, {"params", {{"board", "Uno"}}}}},
        {"serial_format", {{"kind", "unlabeled"}, {"sample_period", 0.1}}},
        {"reference", {{"kind", "simulated"}, {"model", {{"type", "blink_photo"}}}}},
        {"candidate", {{"kind", "simulated"}, {"model", {{"type", "blink_photo"}}}}},
        {"protocol", {{"stages", json::array({{{"duration_s", 10.0}}})}}},
        {"toolchain",
         {{"kind", "scripted"}, {"workdir", "work"}, {"script", "script.json"}}},
    };
}

json actuator_task() {
    return json{
        {"id", "actuator-range"},
        {"prompt", {{"text", kActuatorPrompt}}},
        {"serial_format", {{"kind", "unlabeled"}, {"sample_period", 0.1}}},
        {"reference", {{"kind", "simulated"}, {"model", {{"type", "actuator_range"}}}}},
        {"candidate",
         {{"kind", "simulated"}, {"model", {{"type", "actuator_range"}}}, {"fault", "scale:2"}}},
        {"protocol", {{"stages", json::array({{{"duration_s", 10.0}}})}}},
        {"toolchain",
         {{"kind", "scripted"}, {"workdir", "work"}, {"script", "script.json"}}},
    };
}

json imu_task() {
    json stages = json::array();
    for (double angle : {0.0, 90.0, 180.0}) {
        stages.push_back({{"duration_s", 10.0},
                          {"command", {{"name", "servo_angle"}, {"value", angle}}}});
    }
    return json{
        {"id", "servo-imu"},
        {"prompt", {{"text", kImuPrompt}}},
        {"serial_format",
         {{"kind", "labeled"}, {"labels", json::array({"A_X", "A_Y", "A_Z"})},
          {"sample_period", 0.1}}},
        {"reference", {{"kind", "simulated"}, {"model", {{"type", "servo_imu"}}}}},
        {"candidate",
         {{"kind", "simulated"}, {"model", {{"type", "servo_imu"}}}, {"fault", "all_zeros"}}},
        {"protocol", {{"stages", stages}}},
        {"toolchain",
         {{"kind", "scripted"}, {"workdir", "work"}, {"script", "script.json"}}},
    };
}

std::string rendered(const char* text, bool blink) {
    PromptTemplate tpl;
    tpl.text = text;
    if (blink) {
        tpl.required = {"board"};
        return render_prompt(tpl, {{"board", "Uno"}});
    }
    return render_prompt(tpl, {});
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <output-dir>\n", argv[0]);
        return 2;
    }
    namespace fs = std::filesystem;
    fs::path out = argv[1];
    fs::create_directories(out);

    json config;
    config["records"] = "records.jsonl";
    config["n_per_cell"] = 50;
    config["seed"] = 12345;
    config["providers"] = json::array();
    for (const char* name : {"alpha", "beta", "gamma"}) {
        config["providers"].push_back({{"kind", "replay"},
                                       {"model", name},
                                       {"replay_dir", std::string("replay/") + name}});
    }
    config["tasks"] = json::array({blink_task(), actuator_task(), imu_task()});
    std::ofstream(out / "config.json") << config.dump(2) << "\n";

    // Per-model response tables; broken answers hit the script's default
    // (failing) entry, good ones are keyed by their extracted digest.
    struct Cell {
        const char* task_prompt;
        bool blink;
        const char* model;
        const char* response;
        bool good;
    };
    const Cell cells[] = {
        {kBlinkPrompt, true, "alpha", kBlinkGood, true},
        {kBlinkPrompt, true, "beta", kBlinkBroken, false},
        {kBlinkPrompt, true, "gamma", kBlinkGood, true},
        {kActuatorPrompt, false, "alpha", kActuatorGood, true},
        {kActuatorPrompt, false, "beta", kActuatorBroken, false},
        {kActuatorPrompt, false, "gamma", kActuatorGood, true},
        {kImuPrompt, false, "alpha", kImuGood, true},
        {kImuPrompt, false, "beta", kImuGood, true},
        {kImuPrompt, false, "gamma", kImuBroken, false},
    };

    json script;
    script["default"] = {
        {"ok", false},
        {"diagnostics", "candidate.cpp:4:1: error: expected ',' or ';' before 'void'"}};
    for (const Cell& cell : cells) {
        ReplayProvider::record(out / "replay" / cell.model,
                               {{Role::User, rendered(cell.task_prompt, cell.blink)}},
                               cell.response);
        if (cell.good) {
            script["by_digest"][extract_source(cell.response).digest()] = {{"ok", true}};
        }
    }
    std::ofstream(out / "script.json") << script.dump(2) << "\n";

    std::printf("demo fixtures written to %s\n", out.string().c_str());
    return 0;
}
