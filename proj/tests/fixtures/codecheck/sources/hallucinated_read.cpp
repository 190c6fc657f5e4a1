#include <Wire.h>

const int AXM_ADDR = 0x48;

uint8_t readReg(uint8_t reg) {
  Wire.beginTransmission(AXM_ADDR);
  Wire.write(reg);
  Wire.endTransmission(false);
  Wire.requestFrom(AXM_ADDR, 1);
  return Wire.read();
}

void setup() {
  Serial.begin(9600);
  Wire.begin();
}

void loop() {
  uint8_t who = readReg(0x75);
  Serial.println(who);
  delay(100);
}
