#include <Wire.h>

void setup() {
  Serial.begin(9600);
  Wire.begin();
}

void loop() {
  Wire.beginTransmission(0x49);
  Wire.write(0x0F);
  Wire.endTransmission(false);
  Wire.requestFrom(0x49, 1);
  if (Wire.available()) {
    int sample = Wire.read();
    Serial.println(sample);
  }
  delay(250);
}
